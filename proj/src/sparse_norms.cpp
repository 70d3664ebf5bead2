#include "driftwave/sparse_norms.hpp"

#include <algorithm>
#include <cmath>

namespace driftwave {

using SparseMatrix = Eigen::SparseMatrix<double>;

double sparse_spectral_norm(const SparseMatrix& a) {
    const int n = static_cast<int>(a.cols());
    if (n == 0 || a.nonZeros() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i) v(i) += 1e-3 * std::cos(static_cast<double>(i));
    v.normalize();
    const SparseMatrix at = a.transpose();
    double sigma2 = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd w = at * (a * v).eval();
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        w /= next;
        const bool converged = std::abs(next - sigma2) <= 1e-10 * std::max(1.0, next);
        sigma2 = next;
        v = std::move(w);
        if (converged) break;
    }
    return std::sqrt(sigma2);
}

namespace {

SparseMatrix similarity_scale(const SparseMatrix& a, const Eigen::VectorXd& w) {
    const Eigen::VectorXd s = w.cwiseSqrt();
    SparseMatrix b = a;
    for (int c = 0; c < b.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(b, c); it; ++it)
            it.valueRef() *= s(it.row()) / s(c);
    return b;
}

}  // namespace

double sparse_weighted_norm(const SparseMatrix& a, const Eigen::VectorXd& w) {
    return sparse_spectral_norm(similarity_scale(a, w));
}

double sparse_weighted_sym_norm(const SparseMatrix& a, const Eigen::VectorXd& w) {
    const SparseMatrix b = similarity_scale(a, w);
    const SparseMatrix bt = b.transpose();
    return sparse_spectral_norm(SparseMatrix(0.5 * (b + bt)));
}

double skew_adjointness_defect(const SparseMatrix& a, const Eigen::VectorXd& w) {
    SparseMatrix wa = a;
    for (int c = 0; c < wa.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(wa, c); it; ++it) it.valueRef() *= w(it.row());
    const SparseMatrix wat = wa.transpose();
    return sparse_spectral_norm(SparseMatrix(wa + wat));
}

}  // namespace driftwave
