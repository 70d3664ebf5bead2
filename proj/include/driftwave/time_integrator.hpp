#pragma once

#include "driftwave/evo_assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <memory>

namespace driftwave::evo {

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// One-step implicit midpoint rule for  d/dt M0 x + K x = F  with
// K = M1~ + D + exterior block:
//
//   (M0/dt + K/2) x+ = (M0/dt - K/2) x + F(t + dt/2)
//
// The shifted operator is factorized once per (system, dt).  Systems below
// 2e5 unknowns use a direct sparse LU; larger ones fall back to BiCGSTAB with
// an incomplete-LU preconditioner at relative tolerance 1e-10.  Every solve
// is residual-checked; non-convergence raises SolverError with the residual.
class ImplicitMidpoint {
  public:
    ImplicitMidpoint(const EvoSystem& system, double dt);

    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& f_mid) const;
    double dt() const { return dt_; }
    double last_residual() const { return last_residual_; }

    static constexpr int kDirectSolverLimit = 200000;
    static constexpr double kRelativeTolerance = 1e-10;

  private:
    double dt_;
    SparseMatrix s_plus_, s_minus_;
    bool direct_;
    std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
    std::unique_ptr<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>> krylov_;
    mutable double last_residual_ = 0.0;
};

}  // namespace driftwave::evo
