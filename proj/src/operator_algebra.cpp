#include "driftwave/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace driftwave::algebra {

namespace {

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols())
        throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
}

double power_iteration_norm(const Matrix& a) {
    const int n = static_cast<int>(a.cols());
    Vector v = Vector::Ones(n);
    for (int i = 0; i < n; ++i) v(i) += 1e-3 * std::cos(static_cast<double>(i));
    v.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Vector w = a.transpose() * (a * v);
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        w /= next;
        if (std::abs(next - sigma2) <= 1e-10 * std::max(1.0, next)) {
            sigma2 = next;
            break;
        }
        sigma2 = next;
        v = w;
    }
    return std::sqrt(sigma2);
}

}  // namespace

bool is_finite(const Matrix& a) { return a.allFinite(); }

Matrix adjoint(const Matrix& a) { return a.transpose(); }

Matrix sym_part(const Matrix& c) {
    require_square(c, "sym_part");
    return 0.5 * (c + c.transpose());
}

Matrix skew_part(const Matrix& c) {
    require_square(c, "skew_part");
    return 0.5 * (c - c.transpose());
}

Matrix commutator(const Matrix& alpha, const Matrix& c) {
    require_square(alpha, "commutator");
    require_same_shape(alpha, c, "commutator");
    return alpha * c - c * alpha;
}

Matrix transmutator(const Matrix& l, const Matrix& c, const Matrix& r) {
    if (l.cols() != c.rows() || c.cols() != r.rows() || l.rows() != c.rows() ||
        r.cols() != c.cols())
        throw std::invalid_argument("transmutator: incompatible shapes");
    return l * c - c * r;
}

Matrix resolvent(const Matrix& c, double eta) {
    require_square(c, "resolvent");
    if (eta < 0.0) throw std::invalid_argument("resolvent: eta must be nonnegative");
    const int n = static_cast<int>(c.rows());
    if (eta == 0.0) return Matrix::Identity(n, n);
    Matrix shifted = Matrix::Identity(n, n) + eta * c;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / kConditionLimit))
        throw SingularOperatorError("resolvent: 1 + eta*C numerically singular at eta = " +
                                    std::to_string(eta) + " (rcond = " + std::to_string(rcond) +
                                    ")");
    return lu.solve(Matrix::Identity(n, n));
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    if (std::max(a.rows(), a.cols()) <= 64) {
        Eigen::JacobiSVD<Matrix> svd(a);
        return svd.singularValues()(0);
    }
    return power_iteration_norm(a);
}

const char* to_string(AccretivityVerdict v) {
    switch (v) {
        case AccretivityVerdict::accretive: return "accretive";
        case AccretivityVerdict::quasi_m_accretive: return "quasi_m_accretive";
        case AccretivityVerdict::neither: return "neither";
    }
    return "unknown";
}

AccretivityReport check_accretivity(const Matrix& c, double eta0, int n_samples) {
    require_square(c, "check_accretivity");
    if (eta0 <= 0.0) throw std::invalid_argument("check_accretivity: eta0 must be positive");
    if (n_samples < 1) throw std::invalid_argument("check_accretivity: n_samples must be >= 1");

    AccretivityReport report;
    report.eta0 = eta0;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(c));
    report.min_sym_eigenvalue = eig.eigenvalues().minCoeff();

    bool all_resolvents_exist = true;
    double sup = 1.0;  // eta = 0 contributes ||I|| = 1
    for (int i = 0; i < n_samples; ++i) {
        const double eta = eta0 * static_cast<double>(i + 1) / static_cast<double>(n_samples);
        try {
            sup = std::max(sup, spectral_norm(resolvent(c, eta)));
        } catch (const SingularOperatorError&) {
            all_resolvents_exist = false;
            sup = std::numeric_limits<double>::infinity();
            break;
        }
    }
    report.resolvent_norm_sup = sup;

    if (report.min_sym_eigenvalue >= -1e-12)
        report.verdict = AccretivityVerdict::accretive;
    else if (all_resolvents_exist)
        report.verdict = AccretivityVerdict::quasi_m_accretive;
    else
        report.verdict = AccretivityVerdict::neither;
    return report;
}

double verify_resolvent_commutator(const Matrix& c, const Matrix& alpha, double eta) {
    require_same_shape(c, alpha, "verify_resolvent_commutator");
    const Matrix res = resolvent(c, eta);
    const Matrix lhs = commutator(res, alpha);
    const Matrix rhs = eta * res * commutator(alpha, c) * res;
    return spectral_norm(lhs - rhs);
}

ResolventCommutatorSweep resolvent_commutator_sweep(const Matrix& c, const Matrix& alpha,
                                                    const std::vector<double>& etas) {
    ResolventCommutatorSweep sweep;
    for (double eta : etas) {
        const Matrix res = resolvent(c, eta);
        const Matrix com = commutator(res, alpha);
        sweep.eta.push_back(eta);
        sweep.commutator_norm.push_back(spectral_norm(com));
        sweep.c_commutator_norm.push_back(spectral_norm(c * com));
    }
    return sweep;
}

double verify_weak_equals_strong(const Matrix& c, const Matrix& alpha) {
    require_square(c, "verify_weak_equals_strong");
    require_same_shape(c, alpha, "verify_weak_equals_strong");
    const Matrix com = commutator(alpha, c);
    const double r1 = spectral_norm(alpha * c - (c * alpha + com));
    const double r2 = spectral_norm(adjoint(com) - commutator(adjoint(c), adjoint(alpha)));
    const double r3 = spectral_norm(adjoint(alpha * c) -
                                    (adjoint(alpha) * adjoint(c) +
                                     commutator(adjoint(c), adjoint(alpha))));
    return std::max({r1, r2, r3});
}

double SkewDecompositionReport::max_residual() const {
    return std::max({antisymmetry_residual, formula_residual, adjoint_formula_residual});
}

SkewDecompositionReport verify_skew_decomposition(const Matrix& alpha_sym,
                                                  const Matrix& c_quasi_skew) {
    require_square(alpha_sym, "verify_skew_decomposition");
    require_same_shape(alpha_sym, c_quasi_skew, "verify_skew_decomposition");
    const double asym = spectral_norm(alpha_sym - alpha_sym.transpose());
    if (asym > 1e-12 * (1.0 + spectral_norm(alpha_sym)))
        throw std::invalid_argument("verify_skew_decomposition: alpha must be symmetric");

    const Matrix& a = alpha_sym;
    const Matrix& c = c_quasi_skew;
    const Matrix s = skew_part(a * c);
    const Matrix sym_c = sym_part(c);

    SkewDecompositionReport report;
    report.antisymmetry_residual = spectral_norm(s + s.transpose());
    report.formula_residual =
        spectral_norm(s - (a * c - a * sym_c - 0.5 * commutator(adjoint(c), a)));
    report.adjoint_formula_residual =
        spectral_norm(adjoint(s) + ((c - sym_c) * a + 0.5 * commutator(a, c)));
    return report;
}

SumTheoremReport verify_sum_theorem(const Matrix& c, const Matrix& d,
                                    const std::vector<Matrix>& l_family,
                                    const std::vector<Matrix>& r_family,
                                    const std::vector<double>& epsilons,
                                    const std::vector<Vector>& samples) {
    require_same_shape(c, d, "verify_sum_theorem");
    if (l_family.size() != r_family.size() || l_family.size() != epsilons.size())
        throw std::invalid_argument("verify_sum_theorem: family sizes disagree");

    const Matrix sum = c + d;
    SumTheoremReport report;
    for (std::size_t i = 0; i < l_family.size(); ++i) {
        const Matrix& l = l_family[i];
        const Matrix& r = r_family[i];
        const Matrix t = transmutator(l, sum, r);
        const Matrix t_adj = adjoint(t);

        report.epsilon.push_back(epsilons[i]);
        report.adjoint_identity_residual.push_back(
            spectral_norm(transmutator(adjoint(r), adjoint(sum), adjoint(l)) + t_adj));
        report.adjoint_sum_residual.push_back(spectral_norm(
            adjoint(sum) * adjoint(l) - (adjoint(c) + adjoint(d)) * adjoint(l)));

        double action = 0.0;
        for (const Vector& x : samples)
            if (x.norm() > 0.0) action = std::max(action, (t_adj * x).norm() / x.norm());
        report.transmutator_action_norm.push_back(action);
    }
    return report;
}

std::pair<std::vector<Matrix>, std::vector<Matrix>>
resolvent_transmutator_family(const Matrix& s, const std::vector<double>& epsilons) {
    require_square(s, "resolvent_transmutator_family");
    const int m = static_cast<int>(s.rows());
    std::vector<Matrix> ls, rs;
    for (double eps : epsilons) {
        const Matrix plus = resolvent(s, eps);                        // (1 + eps S)^{-1}
        const Matrix minus = resolvent(-s.transpose().eval(), eps);   // (1 - eps S^T)^{-1}
        Matrix l = Matrix::Zero(2 * m, 2 * m);
        l.topLeftCorner(m, m) = minus;
        l.bottomRightCorner(m, m) = plus;
        Matrix r = Matrix::Zero(2 * m, 2 * m);
        r.topLeftCorner(m, m) = plus;
        r.bottomRightCorner(m, m) = minus;
        ls.push_back(std::move(l));
        rs.push_back(std::move(r));
    }
    return {std::move(ls), std::move(rs)};
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = dist(rng);
    return a;
}

Matrix random_symmetric(std::mt19937_64& rng, int n) {
    const Matrix g = random_matrix(rng, n, n);
    return 0.5 * (g + g.transpose());
}

Matrix random_skew(std::mt19937_64& rng, int n) {
    const Matrix g = random_matrix(rng, n, n);
    return 0.5 * (g - g.transpose());
}

Matrix random_quasi_skew(std::mt19937_64& rng, int n, double sym_scale) {
    return random_skew(rng, n) + sym_scale * random_symmetric(rng, n);
}

Vector random_vector(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

}  // namespace driftwave::algebra
