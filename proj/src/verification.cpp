#include "driftwave/verification.hpp"

#include "driftwave/csv.hpp"
#include "driftwave/exterior_calculus.hpp"
#include "driftwave/operator_algebra.hpp"
#include "driftwave/sparse_norms.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

namespace driftwave::verify {

namespace {

using algebra::Matrix;
using algebra::Vector;

constexpr double kPi = 3.14159265358979323846;

struct Collector {
    VerificationReport& report;

    CheckLine* begin(const std::string& name, const std::string& anchor, double threshold) {
        report.checks.push_back({name, anchor, 0.0, threshold, false, 0});
        return &report.checks.back();
    }
    static void observe(CheckLine* line, double residual) {
        line->residual = std::max(line->residual, residual);
        ++line->cases;
    }
    static void close(CheckLine* line) { line->pass = line->residual <= line->threshold; }
};

int random_size(std::mt19937_64& rng) {
    return 4 + static_cast<int>(rng() % 9);  // 4..12
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(std::log(lo), std::log(hi));
    return std::exp(dist(rng));
}

double quasi_skew_scale(std::mt19937_64& rng) {
    constexpr double scales[3] = {0.01, 0.1, 1.0};
    return scales[rng() % 3];
}

}  // namespace

int VerificationReport::passed() const {
    int n = 0;
    for (const auto& c : checks) n += c.pass ? 1 : 0;
    return n;
}

int VerificationReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

VerificationReport run_operator_identity_suite(std::uint64_t seed, int cases, double eta0) {
    using namespace algebra;
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport report;
    Collector collect{report};
    std::mt19937_64 rng(seed);

    {
        auto* line = collect.begin("adjoint_involution_pairing",
                                   "(A*)* = A and <Ax,y> = <x,A*y>", 1e-13);
        for (int c = 0; c < cases; ++c) {
            const Matrix a = random_matrix(rng, random_size(rng), random_size(rng));
            double r = (adjoint(adjoint(a)) - a).lpNorm<Eigen::Infinity>();
            const Matrix at = adjoint(a);
            for (int s = 0; s < 4; ++s) {
                const Vector x = random_vector(rng, static_cast<int>(a.cols()));
                const Vector y = random_vector(rng, static_cast<int>(a.rows()));
                r = std::max(r, std::abs((a * x).dot(y) - x.dot(at * y)));
            }
            Collector::observe(line, r);
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("sym_skew_decomposition", "C = sym C + skew C", 1e-14);
        for (int c = 0; c < cases; ++c) {
            const int n = random_size(rng);
            const Matrix g = random_matrix(rng, n, n);
            const double rel =
                (sym_part(g) + skew_part(g) - g).norm() / std::max(g.norm(), 1e-300);
            Collector::observe(line, rel);
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("skew_resolvent_contraction",
                                   "||(1 + eta C)^{-1}|| <= 1 for skew C, eta >= 0", 1e-12);
        for (int c = 0; c < cases; ++c) {
            const Matrix s = random_skew(rng, random_size(rng));
            const double eta = log_uniform(rng, 1e-3, 10.0);
            Collector::observe(line, std::max(0.0, spectral_norm(resolvent(s, eta)) - 1.0));
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin(
            "resolvent_strong_convergence",
            "(1 + eta C)^{-1} x - x = -eta (1 + eta C)^{-1} C x", 1e-12);
        for (int c = 0; c < cases; ++c) {
            const int n = random_size(rng);
            const Matrix q = random_quasi_skew(rng, n, quasi_skew_scale(rng));
            const Vector x = random_vector(rng, n);
            const double eta = log_uniform(rng, 1e-4, 0.3);
            const Matrix r = resolvent(q, eta);
            const double lhs = (r * x - x + eta * r * (q * x)).norm();
            Collector::observe(line, lhs);
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin(
            "perturbation_resolvent_bound",
            "sup_{0<=eta<=eta0} ||(1 + eta(S+B))^{-1}|| <= 1/(1 - eta0 ||B||)", 1e-10);
        std::uniform_real_distribution<double> beta_dist(0.1, 0.9);
        for (int c = 0; c < cases; ++c) {
            const int n = random_size(rng);
            const Matrix s = random_skew(rng, n);
            Matrix b = random_symmetric(rng, n);
            const double beta = beta_dist(rng);
            b *= beta / (eta0 * spectral_norm(b));
            const auto acc = check_accretivity(s + b, eta0, 8);
            const double bound = 1.0 / (1.0 - eta0 * spectral_norm(b));
            Collector::observe(line, std::max(0.0, acc.resolvent_norm_sup - bound));
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin(
            "resolvent_commutator",
            "[(1 + eta C)^{-1}, a] = eta (1 + eta C)^{-1} [a,C] (1 + eta C)^{-1}", 1e-12);
        int accepted = 0;
        while (accepted < cases) {
            const int n = random_size(rng);
            const Matrix c = random_quasi_skew(rng, n, quasi_skew_scale(rng));
            const Matrix alpha = random_symmetric(rng, n);
            const double eta = log_uniform(rng, 1e-4, 0.5);
            const Matrix shifted = Matrix::Identity(n, n) + eta * c;
            Eigen::JacobiSVD<Matrix> svd(shifted);
            const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
            if (cond > 1e8) continue;  // outside the conditioning contract
            Collector::observe(line, verify_resolvent_commutator(c, alpha, eta));
            ++accepted;
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("c_commutator_strong_decay",
                                   "C [(1 + eta C)^{-1}, a] -> 0 as eta -> 0+", 1e-12);
        const std::vector<double> etas{1e-1, 1e-2, 1e-3, 1e-4};
        const int sweep_cases = std::max(cases / 10, 10);
        for (int c = 0; c < sweep_cases; ++c) {
            const int n = random_size(rng);
            const Matrix q = random_quasi_skew(rng, n, quasi_skew_scale(rng));
            const Matrix alpha = random_symmetric(rng, n);
            const auto sweep = resolvent_commutator_sweep(q, alpha, etas);
            double r = 0.0;
            for (std::size_t i = 0; i + 1 < etas.size(); ++i)
                r = std::max(r, sweep.c_commutator_norm[i + 1] - sweep.c_commutator_norm[i]);
            Collector::observe(line, std::max(0.0, r));
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("weak_equals_strong",
                                   "aC = Ca + [a,C];  [a,C]* = [C*,a*];  (aC)* = a*C* + [C*,a*]",
                                   1e-12);
        for (int c = 0; c < cases; ++c) {
            const int n = random_size(rng);
            Collector::observe(line, verify_weak_equals_strong(random_matrix(rng, n, n),
                                                               random_matrix(rng, n, n)));
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin(
            "skew_splitting", "skew(aC) = aC - a sym C - (1/2)[C*,a]", 1e-12);
        for (int c = 0; c < cases; ++c) {
            const int n = random_size(rng);
            const Matrix alpha = random_symmetric(rng, n);
            const Matrix q = random_quasi_skew(rng, n, quasi_skew_scale(rng));
            Collector::observe(line, verify_skew_decomposition(alpha, q).max_residual());
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("transmutator_adjoint",
                                   "[R*, (C+D)*, L*] = -[L, C+D, R]*", 1e-12);
        for (int c = 0; c < cases; ++c) {
            const int n = random_size(rng);
            const Matrix cc = random_matrix(rng, n, n);
            const Matrix dd = random_matrix(rng, n, n);
            const Matrix l = random_matrix(rng, n, n);
            const Matrix r = random_matrix(rng, n, n);
            const auto rep = verify_sum_theorem(cc, dd, {l}, {r}, {1.0},
                                                {random_vector(rng, n)});
            Collector::observe(line, std::max(rep.adjoint_identity_residual[0],
                                              rep.adjoint_sum_residual[0]));
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("transmutator_family_decay",
                                   "[L_eps, C+D, R_eps]* -> 0 as eps -> 0", 1e-12);
        const std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
        const int family_cases = std::max(cases / 10, 10);
        for (int c = 0; c < family_cases; ++c) {
            const int m = 4 + static_cast<int>(rng() % 3);
            const Matrix base = random_quasi_skew(rng, m, 0.1);
            const auto [ls, rs] = resolvent_transmutator_family(base, eps);
            Matrix lblock = Matrix::Zero(2 * m, 2 * m);
            lblock.topLeftCorner(m, m) = base;
            lblock.bottomRightCorner(m, m) = -base.transpose();
            const Matrix mult = random_symmetric(rng, m);
            Matrix mult_blk = Matrix::Zero(2 * m, 2 * m);
            mult_blk.topLeftCorner(m, m) = mult;
            mult_blk.bottomRightCorner(m, m) = mult;
            const Matrix cc = skew_part(mult_blk * lblock);
            Matrix dd = Matrix::Zero(2 * m, 2 * m);
            const Matrix b2 = base * base;
            dd.topRightCorner(m, m) = -b2.transpose();
            dd.bottomLeftCorner(m, m) = b2;
            std::vector<Vector> samples;
            for (int s = 0; s < 3; ++s) samples.push_back(random_vector(rng, 2 * m));
            const auto rep = verify_sum_theorem(cc, dd, ls, rs, eps, samples);
            double r = 0.0;
            for (std::size_t i = 0; i < eps.size(); ++i)
                r = std::max(r, rep.adjoint_identity_residual[i]);
            for (std::size_t i = 0; i + 1 < eps.size(); ++i)
                r = std::max(r, rep.transmutator_action_norm[i + 1] -
                                    rep.transmutator_action_norm[i]);
            Collector::observe(line, r);
        }
        Collector::close(line);
    }

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

dec::Cochain random_form(std::mt19937_64& rng, const dec::CylinderGrid& g, int degree) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return dec::Cochain::sample(g, degree,
                                [&](const Eigen::Vector3d&, int) { return dist(rng); });
}

double max_abs_entry(const dec::SparseMatrix& m) {
    double v = 0.0;
    for (int c = 0; c < m.outerSize(); ++c)
        for (dec::SparseMatrix::InnerIterator it(m, c); it; ++it)
            v = std::max(v, std::abs(it.value()));
    return v;
}

}  // namespace

VerificationReport run_calculus_suite(const dec::GridSpec& base, std::uint64_t seed) {
    using namespace dec;
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport report;
    Collector collect{report};
    std::mt19937_64 rng(seed);

    GridSpec fine = base;
    fine.nx *= 2;
    fine.ny *= 2;
    fine.nz *= 2;
    const CylinderGrid grids[2] = {CylinderGrid::cylinder(base), CylinderGrid::cylinder(fine)};

    {
        auto* line = collect.begin("exterior_dd_zero", "d(d omega) = 0", 0.0);
        for (const auto& g : grids)
            for (int k = 0; k + 1 < 3; ++k) {
                Collector::observe(line,
                                   max_abs_entry(SparseMatrix(g.incidence(k + 1) *
                                                              g.incidence(k))));
                Collector::observe(
                    line, max_abs_entry(SparseMatrix(
                              g.derivative_matrix(k + 1, Variant::dirichlet) *
                              g.derivative_matrix(k, Variant::dirichlet))));
            }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("adjoint_pairing", "<d S, T> = <S, d* T>", 1e-13);
        for (const auto& g : grids)
            for (int k = 0; k < 3; ++k)
                for (auto variant : {Variant::full, Variant::dirichlet})
                    for (int trial = 0; trial < 85; ++trial) {
                        const Cochain s = random_form(rng, g, k);
                        const Cochain t = random_form(rng, g, k + 1);
                        const double lhs = inner_product(exterior_derivative(s, variant), t);
                        const double rhs = inner_product(s, codifferential(t, variant));
                        Collector::observe(line, std::abs(lhs - rhs));
                    }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("hodge_isometry", "<*a, *b> = <a, b>", 1e-13);
        for (const auto& g : grids)
            for (int k = 0; k <= 3; ++k)
                for (int trial = 0; trial < 65; ++trial) {
                    const Cochain a = random_form(rng, g, k);
                    const Cochain b = random_form(rng, g, k);
                    Collector::observe(line, std::abs(inner_product(hodge_star(a),
                                                                    hodge_star(b)) -
                                                      inner_product(a, b)));
                }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("hodge_double_star", "**a = a  (n = 3)", 1e-12);
        for (const auto& g : grids)
            for (int k = 0; k <= 3; ++k) {
                const Cochain a = random_form(rng, g, k);
                Cochain d = hodge_star(hodge_star(a));
                d.values -= a.values;
                Collector::observe(line, d.values.lpNorm<Eigen::Infinity>());
            }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("cartan_commutation", "d L_X = L_X d", 1e-12);
        for (const auto& g : grids) {
            const auto x = VectorFieldSample::sample(g, [&g](const Eigen::Vector3d& p) {
                return Eigen::Vector3d(0, 0, 1.0 + 0.5 * std::sin(2 * kPi * p.z() /
                                                                  g.length(2)));
            });
            for (int k = 0; k < 3; ++k) {
                const Cochain w = random_form(rng, g, k);
                const Cochain a = exterior_derivative(lie_derivative(x, w), Variant::full);
                const Cochain b = lie_derivative(x, exterior_derivative(w, Variant::full));
                Collector::observe(line, (a.values - b.values).lpNorm<Eigen::Infinity>());
            }
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("lie_axial_convergence",
                                   "L_{e3} omega -> d3 omega at order >= 1.8", 0.0);
        for (int degree : {0, 1}) {
            std::array<double, 3> errs{};
            for (int level = 0; level < 3; ++level) {
                GridSpec s = base;
                s.nz = std::max(8, s.nz) << level;
                s.axial = AxialTopology::periodic;
                const CylinderGrid g = CylinderGrid::cylinder(s);
                const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
                const double kz = 2 * kPi / s.lz;
                const Cochain w = Cochain::sample(g, degree, [&](const Eigen::Vector3d& p,
                                                                 int) {
                    return std::sin(kz * p.z());
                });
                const Cochain expected =
                    Cochain::sample(g, degree, [&](const Eigen::Vector3d& p, int) {
                        return kz * std::cos(kz * p.z());
                    });
                Cochain diff = lie_derivative(e3, w);
                diff.values -= expected.values;
                errs[level] = norm(diff);
            }
            const double order = std::min(std::log2(errs[0] / errs[1]),
                                          std::log2(errs[1] / errs[2]));
            Collector::observe(line, std::max(0.0, 1.8 - order));
        }
        Collector::close(line);
    }

    {
        auto* line = collect.begin("lie_constant_skewness",
                                   "M L_{e3} + L_{e3}^T M = 0 on the periodic axis", 1e-12);
        GridSpec s = base;
        s.axial = AxialTopology::periodic;
        const CylinderGrid g = CylinderGrid::cylinder(s);
        const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
        for (int k = 0; k <= 3; ++k)
            Collector::observe(line, skew_adjointness_defect(lie_derivative_matrix(e3, k),
                                                             g.mass(k)));
        Collector::close(line);
    }

    {
        auto* line = collect.begin("mass_partition", "sum of dual volumes = |Omega|", 1e-12);
        for (const auto& g : grids)
            Collector::observe(line, std::abs(g.mass(0).sum() - g.length(0) * g.length(1) *
                                                                    g.length(2)));
        Collector::close(line);
    }

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void write_report_text(std::ostream& out, const VerificationReport& report) {
    for (const auto& c : report.checks) {
        out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (cases: " << c.cases
            << ", max residual: " << io::format_double(c.residual)
            << ", threshold: " << io::format_double(c.threshold) << ")\n"
            << "      identity: " << c.anchor << "\n";
    }
    out << report.passed() << " of " << report.checks.size() << " checks passed\n";
}

void write_report_csv(std::ostream& out, const VerificationReport& report) {
    io::CsvWriter csv(out);
    csv.row({"check", "anchor", "cases", "residual", "threshold", "status"});
    for (const auto& c : report.checks)
        csv.row({c.name, c.anchor, std::to_string(c.cases), io::format_double(c.residual),
                 io::format_double(c.threshold), c.pass ? "pass" : "fail"});
}

}  // namespace driftwave::verify
