#pragma once

#include <Eigen/Sparse>

namespace driftwave {

// Largest singular value by power iteration on A^T A with a fixed start
// vector (tol 1e-10, at most 1e4 iterations); deterministic.
double sparse_spectral_norm(const Eigen::SparseMatrix<double>& a);

// Spectral norm of diag(sqrt(w)) * A * diag(1/sqrt(w)), the operator norm of
// A under the inner product weighted by the positive diagonal w.
double sparse_weighted_norm(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& w);

// Norm of the symmetric part of A under the w-weighted inner product.
double sparse_weighted_sym_norm(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& w);

// Norm of the skewness defect  W A + A^T W  (zero when A is w-skew-adjoint).
double skew_adjointness_defect(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& w);

}  // namespace driftwave
