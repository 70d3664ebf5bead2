#include "driftwave/time_integrator.hpp"

#include <cmath>
#include <sstream>

namespace driftwave::evo {

ImplicitMidpoint::ImplicitMidpoint(const EvoSystem& system, double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ImplicitMidpoint: dt must be positive");
    const int n = system.size();
    const SparseMatrix k = system.generator();

    SparseMatrix m0dt(n, n);
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(n);
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, system.m0(i) / dt);
        m0dt.setFromTriplets(trips.begin(), trips.end());
    }
    s_plus_ = SparseMatrix(m0dt + SparseMatrix(0.5 * k));
    s_minus_ = SparseMatrix(m0dt - SparseMatrix(0.5 * k));
    s_plus_.makeCompressed();
    s_minus_.makeCompressed();

    direct_ = n < kDirectSolverLimit;
    if (direct_) {
        lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
        lu_->compute(s_plus_);
        if (lu_->info() != Eigen::Success)
            throw SolverError("ImplicitMidpoint: sparse LU factorization failed");
    } else {
        krylov_ = std::make_unique<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>>();
        krylov_->setTolerance(kRelativeTolerance);
        krylov_->setMaxIterations(2000);
        krylov_->compute(s_plus_);
        if (krylov_->info() != Eigen::Success)
            throw SolverError("ImplicitMidpoint: preconditioner setup failed");
    }
}

Eigen::VectorXd ImplicitMidpoint::step(const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& f_mid) const {
    Eigen::VectorXd rhs = s_minus_ * x;
    if (f_mid.size() > 0) rhs += f_mid;

    Eigen::VectorXd next = direct_ ? lu_->solve(rhs).eval() : krylov_->solve(rhs).eval();
    const double scale = std::max(rhs.norm(), 1e-300);
    last_residual_ = (s_plus_ * next - rhs).norm() / scale;
    if (!(last_residual_ <= kRelativeTolerance * 100)) {
        std::ostringstream msg;
        msg << "ImplicitMidpoint: linear solve did not converge, relative residual "
            << last_residual_;
        throw SolverError(msg.str());
    }
    return next;
}

}  // namespace driftwave::evo
