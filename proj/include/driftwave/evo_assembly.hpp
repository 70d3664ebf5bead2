#pragma once

#include "driftwave/exterior_calculus.hpp"

// Assembly of the first-order evolution system on k-forms x (k+1)-forms:
//
//   d/dt M0 x + M1~ x + (D + [[0, -d*],[d, 0]]) x = F
//
// with the drift A = alpha M0 diag(L, -L*) split into its mass-symmetric part
// C (folded into M1~ together with the covariant/Lie mismatch and the
// M0 commutator) and its mass-skew part D.  The exterior block uses the
// boundary-constrained derivative, so D + exterior block is exactly
// skew-adjoint under the product mass inner product and the energy
// <M0 x, x> is conserved whenever M1~ vanishes.

namespace driftwave::evo {

using dec::CylinderGrid;
using dec::SparseMatrix;
using dec::VectorFieldSample;

struct DriftSpec {
    VectorFieldSample x0;
    Eigen::VectorXd alpha_vertex;        // multiplier sampled per vertex
    double max_speed = 0.0;              // sup |X0|
    double commutation_defect = 0.0;     // ||M0 alpha - alpha M0|| over the dofs

    static DriftSpec make(const CylinderGrid& grid,
                          const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field,
                          const std::function<double(const Eigen::Vector3d&)>& alpha);
};

// Averages a vertex-sampled scalar over the corner vertices of every cell of
// the given degree.
Eigen::VectorXd cell_average(const CylinderGrid& grid, int degree,
                             const Eigen::VectorXd& vertex_values);

// [[0, -d*],[d, 0]] with the boundary-constrained derivative, acting on
// stacked (k-cochain, (k+1)-cochain) vectors.
SparseMatrix assemble_exterior_block(const CylinderGrid& grid, int degree);

struct DriftDecomposition {
    SparseMatrix l_block;    // diag(L_k, -L_{k+1}*)
    SparseMatrix c_sym;      // mass-symmetric part of alpha M0 l_block
    SparseMatrix d_skew;     // mass-skew part
    SparseMatrix remainder;  // alpha (nabla - l_block) M0 + alpha [l_block, M0]
};

DriftDecomposition assemble_drift_decomposition(const CylinderGrid& grid, int degree,
                                                const DriftSpec& drift,
                                                const Eigen::VectorXd& m0_diag);

struct M1TildeResult {
    SparseMatrix m1_tilde;  // M1 + remainder + C
    double norm = 0.0;      // mass-operator norm
    double sym_norm = 0.0;
    double rho0 = 0.0;      // (norm + 1) / c0, margin-1 admissible weight
};

M1TildeResult assemble_m1_tilde(const SparseMatrix& m1, const DriftDecomposition& drift,
                                const Eigen::VectorXd& mass, double c0);

struct EvoSystem {
    const CylinderGrid* grid = nullptr;
    int degree = 0;
    int size_u = 0, size_w = 0;

    Eigen::VectorXd mass;  // stacked [mass_k; mass_{k+1}]
    Eigen::VectorXd m0;    // diagonal material block, strictly positive
    SparseMatrix m1;
    SparseMatrix a_exterior;
    DriftDecomposition drift;
    SparseMatrix m1_tilde;

    double c0 = 0.0;               // min entry of m0
    double m1_tilde_norm = 0.0;
    double m1_tilde_sym_norm = 0.0;
    double rho0 = 0.0;
    double skew_defect = 0.0;      // ||W A + A^T W|| for A = d_skew + a_exterior
    double max_drift_speed = 0.0;

    int size() const { return size_u + size_w; }
    SparseMatrix generator() const;  // m1_tilde + d_skew + a_exterior
    double energy(const Eigen::VectorXd& x) const;   // <W M0 x, x>
    double h_norm(const Eigen::VectorXd& x) const;   // sqrt(<W x, x>)
};

// m0_diag has length cells(k) + cells(k+1); m1 may be empty (treated as 0).
EvoSystem assemble_system(const CylinderGrid& grid, int degree, const DriftSpec& drift,
                          Eigen::VectorXd m0_diag, SparseMatrix m1);

}  // namespace driftwave::evo
