#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "driftwave/exterior_calculus.hpp"
#include "driftwave/sparse_norms.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace driftwave;
using namespace driftwave::dec;

namespace {

Cochain random_cochain(std::mt19937_64& rng, const CylinderGrid& g, int degree) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Cochain c = Cochain::zero(g, degree);
    for (int i = 0; i < c.values.size(); ++i) c.values(i) = dist(rng);
    return c;
}

// Random cochain with form-unit scaling: O(1) components integrated over the
// cells, so inner products stay O(1) on refined grids.
Cochain random_form(std::mt19937_64& rng, const CylinderGrid& g, int degree) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return Cochain::sample(g, degree,
                           [&](const Eigen::Vector3d&, int) { return dist(rng); });
}

double max_abs(const SparseMatrix& m) {
    double v = 0.0;
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it)
            v = std::max(v, std::abs(it.value()));
    return v;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("cell counts match the combinatorial oracle") {
    SUBCASE("fully periodic 2x2x2 torus") {
        const auto g = CylinderGrid::torus3(2, 2, 2, 1, 1, 1);
        CHECK(g.cells(0) == 8);
        CHECK(g.cells(1) == 24);
        CHECK(g.cells(2) == 24);
        CHECK(g.cells(3) == 8);
    }
    SUBCASE("cylinder counts from first principles") {
        for (auto axial : {AxialTopology::periodic, AxialTopology::truncated}) {
            GridSpec spec{3, 4, 5, 1.0, 2.0, 3.0, axial};
            const auto g = CylinderGrid::cylinder(spec);
            const int vx = spec.nx + 1, vy = spec.ny + 1;
            const int vz = axial == AxialTopology::periodic ? spec.nz : spec.nz + 1;
            CHECK(g.cells(0) == vx * vy * vz);
            CHECK(g.cells(1) == spec.nx * vy * vz + vx * spec.ny * vz + vx * vy * spec.nz);
            CHECK(g.cells(2) == spec.nx * spec.ny * vz + spec.nx * vy * spec.nz +
                                    vx * spec.ny * spec.nz);
            CHECK(g.cells(3) == spec.nx * spec.ny * spec.nz);
        }
    }
    SUBCASE("invalid grids are rejected") {
        CHECK_THROWS_AS(CylinderGrid::torus3(1, 2, 2, 1, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(CylinderGrid::cylinder({2, 2, 2, 0.0, 1.0, 1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("incidence matrices are signed with two entries per spanned axis") {
    for (auto axial : {AxialTopology::periodic, AxialTopology::truncated}) {
        GridSpec spec{3, 4, 3, 1.0, 1.0, 1.0, axial};
        const auto g = CylinderGrid::cylinder(spec);
        for (int k = 0; k < 3; ++k) {
            const auto& d = g.incidence(k);
            std::vector<int> per_row(g.cells(k + 1), 0);
            for (int c = 0; c < d.outerSize(); ++c)
                for (SparseMatrix::InnerIterator it(d, c); it; ++it) {
                    CHECK((it.value() == 1.0 || it.value() == -1.0));
                    ++per_row[it.row()];
                }
            for (int count : per_row) CHECK(count == 2 * (k + 1));
        }
    }
}

TEST_CASE("vector fields report their wall tangency") {
    GridSpec spec{4, 4, 4, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const auto tangent = VectorFieldSample::sample(g, [](const Eigen::Vector3d& p) {
        return Eigen::Vector3d(std::sin(kPi * p.x()), 0.0, 1.0);  // vanishes at x walls
    });
    CHECK(tangent.wall_normal_defect() <= 1e-12);
    const auto crossing = VectorFieldSample::constant(g, {1, 0, 0});
    CHECK(crossing.wall_normal_defect() == 1.0);
}

TEST_CASE("mass of the unit 0-cochain partitions the volume") {
    for (auto axial : {AxialTopology::periodic, AxialTopology::truncated}) {
        GridSpec spec{4, 3, 5, 1.5, 0.7, 2.25, axial};
        const auto g = CylinderGrid::cylinder(spec);
        const double total = g.mass(0).sum();
        CHECK(std::abs(total - spec.lx * spec.ly * spec.lz) <= 1e-12);
    }
}

TEST_CASE("truncated and periodic grids differ only in axial wrap entries") {
    GridSpec ps{3, 3, 3, 1, 1, 1, AxialTopology::periodic};
    GridSpec ts{3, 3, 3, 1, 1, 1, AxialTopology::truncated};
    const auto gp = CylinderGrid::cylinder(ps);
    const auto gt = CylinderGrid::cylinder(ts);

    for (int k = 0; k < 3; ++k) {
        const Eigen::MatrixXd dp = Eigen::MatrixXd(gp.incidence(k));
        const Eigen::MatrixXd dt = Eigen::MatrixXd(gt.incidence(k));
        int mismatches = 0;
        for (int r = 0; r < dp.rows(); ++r) {
            int rtype, ri, rj, rk;
            gp.cell_coords(k + 1, r, rtype, ri, rj, rk);
            const int dirs = CylinderGrid::type_dirs(k + 1, rtype);
            const bool wrap_row = (dirs & 0b100) && rk == gp.n(2) - 1;
            // same coordinates index a valid truncated cell for every
            // periodic cell, so the row maps across directly
            const int r_t = gt.cell_index(k + 1, rtype, ri, rj, rk);
            for (int c = 0; c < dp.cols(); ++c) {
                int ctype, ci, cj, ck;
                gp.cell_coords(k, c, ctype, ci, cj, ck);
                const int c_t = gt.cell_index(k, ctype, ci, cj, ck);
                if (dp(r, c) != dt(r_t, c_t)) {
                    ++mismatches;
                    CHECK(wrap_row);
                }
            }
        }
        CHECK(mismatches > 0);
    }
}

TEST_CASE("d of constants and coordinates") {
    GridSpec spec{3, 3, 4, 1, 1, 2, AxialTopology::truncated};
    const auto g = CylinderGrid::cylinder(spec);

    const Cochain ones = Cochain::sample(g, 0, [](const Eigen::Vector3d&, int) { return 1.0; });
    CHECK(exterior_derivative(ones, Variant::full).values.norm() == 0.0);

    const Cochain zc =
        Cochain::sample(g, 0, [](const Eigen::Vector3d& p, int) { return p.z(); });
    const Cochain dz = exterior_derivative(zc, Variant::full);
    const double hz = g.spacing(2);
    for (int t = 0; t < 3; ++t) {
        const int dirs = CylinderGrid::type_dirs(1, t);
        for (int k = 0; k < g.extent(1, t, 2); ++k)
            for (int j = 0; j < g.extent(1, t, 1); ++j)
                for (int i = 0; i < g.extent(1, t, 0); ++i) {
                    const double v = dz.values(g.cell_index(1, t, i, j, k));
                    if (dirs == 0b100)
                        CHECK(v == doctest::Approx(hz).epsilon(1e-14));
                    else
                        CHECK(v == 0.0);
                }
    }

    const auto g3 = CylinderGrid::torus3(2, 2, 2, 1, 1, 1);
    Cochain top = Cochain::zero(g3, 3);
    CHECK_THROWS_AS(exterior_derivative(top, Variant::full), std::invalid_argument);
}

TEST_CASE("d compose d vanishes exactly for both variants") {
    for (auto axial : {AxialTopology::periodic, AxialTopology::truncated}) {
        GridSpec spec{3, 4, 3, 1.0, 1.3, 0.9, axial};
        const auto g = CylinderGrid::cylinder(spec);
        for (int k = 0; k + 1 < 3; ++k) {
            const SparseMatrix dd_full =
                SparseMatrix(g.incidence(k + 1) * g.incidence(k));
            CHECK(max_abs(dd_full) == 0.0);
            const SparseMatrix dd_dir =
                SparseMatrix(g.derivative_matrix(k + 1, Variant::dirichlet) *
                             g.derivative_matrix(k, Variant::dirichlet));
            CHECK(max_abs(dd_dir) == 0.0);
        }
    }
}

TEST_CASE("reduced dirichlet matrix agrees with the projector form") {
    GridSpec spec{3, 3, 3, 1, 1, 1, AxialTopology::truncated};
    const auto g = CylinderGrid::cylinder(spec);
    auto rng = std::mt19937_64(11);
    for (int k = 0; k < 3; ++k) {
        const Cochain omega = random_cochain(rng, g, k);
        const Cochain embedded = exterior_derivative(omega, Variant::dirichlet);
        const SparseMatrix reduced = g.derivative_matrix(k, Variant::dirichlet);
        const auto rows = g.interior_cells(k + 1);
        const auto cols = g.interior_cells(k);
        Eigen::VectorXd omega_red(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) omega_red(i) = omega.values(cols[i]);
        const Eigen::VectorXd out_red = reduced * omega_red;
        for (std::size_t i = 0; i < rows.size(); ++i)
            CHECK(out_red(i) == embedded.values(rows[i]));
        // embedded output vanishes on boundary cells automatically
        for (int i = 0; i < g.cells(k + 1); ++i)
            if (g.boundary_mask(k + 1)[i]) CHECK(embedded.values(i) == 0.0);
    }
}

TEST_CASE("codifferential is the exact mass adjoint of d") {
    auto rng = std::mt19937_64(17);
    for (auto axial : {AxialTopology::periodic, AxialTopology::truncated}) {
        GridSpec spec{4, 4, 4, 1.0, 1.1, 0.8, axial};
        const auto g = CylinderGrid::cylinder(spec);
        for (int k = 0; k < 3; ++k) {
            for (auto variant : {Variant::full, Variant::dirichlet}) {
                for (int trial = 0; trial < 60; ++trial) {
                    const Cochain s = random_form(rng, g, k);
                    const Cochain t = random_form(rng, g, k + 1);
                    const double lhs = inner_product(exterior_derivative(s, variant), t);
                    const double rhs = inner_product(s, codifferential(t, variant));
                    CHECK(std::abs(lhs - rhs) <= 1e-13);
                }
            }
        }
        // d* of d* vanishes to rounding
        const Cochain t3 = random_cochain(rng, g, 3);
        const Cochain once = codifferential(t3, Variant::full);
        const Cochain twice = codifferential(once, Variant::full);
        CHECK(twice.values.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + t3.values.norm()));

        Cochain zero1 = Cochain::zero(g, 1);
        CHECK(codifferential(zero1, Variant::full).values.norm() == 0.0);
        Cochain c0 = Cochain::zero(g, 0);
        CHECK_THROWS_AS(codifferential(c0, Variant::full), std::invalid_argument);
    }
}

TEST_CASE("hodge star volume form, double star, isometry") {
    const auto g = CylinderGrid::torus3(3, 4, 5, 0.9, 1.2, 2.0);
    const Cochain ones = Cochain::sample(g, 0, [](const Eigen::Vector3d&, int) { return 1.0; });
    const Cochain vol = hodge_star(ones);
    CHECK(vol.degree == 3);
    CHECK(vol.dual);
    const double cell = g.spacing(0) * g.spacing(1) * g.spacing(2);
    for (int i = 0; i < vol.values.size(); ++i)
        CHECK(vol.values(i) == doctest::Approx(cell).epsilon(1e-14));

    auto rng = std::mt19937_64(23);
    const Cochain w1 = random_cochain(rng, g, 1);
    const Cochain back = hodge_star(hodge_star(w1));
    CHECK((back.values - w1.values).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK_FALSE(back.dual);

    GridSpec cyl{4, 4, 4, 1.0, 0.7, 1.4, AxialTopology::truncated};
    const auto gc = CylinderGrid::cylinder(cyl);
    for (int k = 0; k <= 3; ++k)
        for (int trial = 0; trial < 125; ++trial) {
            const Cochain a = random_form(rng, gc, k);
            const Cochain b = random_form(rng, gc, k);
            const double lhs = inner_product(hodge_star(a), hodge_star(b));
            const double rhs = inner_product(a, b);
            CHECK(std::abs(lhs - rhs) <= 1e-13);
        }
}

TEST_CASE("interior product contraction") {
    GridSpec spec{3, 3, 4, 1, 1, 2, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    auto rng = std::mt19937_64(29);

    const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
    const auto zero_field = VectorFieldSample::zero(g);

    const Cochain w1 = random_cochain(rng, g, 1);
    CHECK(interior_product(zero_field, w1).values.norm() == 0.0);

    // axial 1-cochain with value hz per z-edge contracts against e3 to ones
    Cochain axial = Cochain::zero(g, 1);
    const double hz = g.spacing(2);
    for (int k = 0; k < g.extent(1, 2, 2); ++k)
        for (int j = 0; j < g.extent(1, 2, 1); ++j)
            for (int i = 0; i < g.extent(1, 2, 0); ++i)
                axial.values(g.cell_index(1, 2, i, j, k)) = hz;
    const Cochain contracted = interior_product(e3, axial);
    for (int i = 0; i < contracted.values.size(); ++i)
        CHECK(contracted.values(i) == doctest::Approx(1.0).epsilon(1e-14));

    // x-edge values are transverse to e3 and contract to zero
    Cochain xonly = random_cochain(rng, g, 1);
    for (int t = 1; t < 3; ++t)
        for (int k = 0; k < g.extent(1, t, 2); ++k)
            for (int j = 0; j < g.extent(1, t, 1); ++j)
                for (int i = 0; i < g.extent(1, t, 0); ++i)
                    xonly.values(g.cell_index(1, t, i, j, k)) = 0.0;
    CHECK(interior_product(e3, xonly).values.norm() == 0.0);

    // double contraction with a constant field vanishes
    auto rng2 = std::mt19937_64(31);
    const auto xc = VectorFieldSample::constant(g, {0.7, -0.3, 1.1});
    for (int k : {2, 3}) {
        const Cochain w = random_cochain(rng2, g, k);
        const Cochain twice = interior_product(xc, interior_product(xc, w));
        CHECK(twice.values.lpNorm<Eigen::Infinity>() <= 1e-12);
    }

    Cochain c0 = Cochain::zero(g, 0);
    CHECK_THROWS_AS(interior_product(e3, c0), std::invalid_argument);
}

TEST_CASE("lie derivative via the contraction formula") {
    auto rng = std::mt19937_64(37);

    SUBCASE("constants are transported to zero") {
        const auto g = CylinderGrid::torus3(3, 3, 4, 1, 1, 1);
        const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
        const Cochain ones =
            Cochain::sample(g, 0, [](const Eigen::Vector3d&, int) { return 1.0; });
        CHECK(lie_derivative(e3, ones).values.lpNorm<Eigen::Infinity>() <= 1e-14);
    }

    SUBCASE("axial derivative converges at second order") {
        for (int degree : {0, 1, 2}) {
            std::array<double, 3> errs{};
            for (int level = 0; level < 3; ++level) {
                const int nz = 8 << level;
                GridSpec spec{4, 4, nz, 1, 1, 1, AxialTopology::periodic};
                const auto g = CylinderGrid::cylinder(spec);
                const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
                auto f = [&](const Eigen::Vector3d& p, int) {
                    return std::sin(2 * kPi * p.z());
                };
                auto df = [&](const Eigen::Vector3d& p, int) {
                    return 2 * kPi * std::cos(2 * kPi * p.z());
                };
                const Cochain w = Cochain::sample(g, degree, f);
                const Cochain expected = Cochain::sample(g, degree, df);
                Cochain diff = lie_derivative(e3, w);
                diff.values -= expected.values;
                errs[level] = norm(diff);
            }
            const double order1 = std::log2(errs[0] / errs[1]);
            const double order2 = std::log2(errs[1] / errs[2]);
            CHECK(order1 >= 1.8);
            CHECK(order2 >= 1.8);
        }
    }

    SUBCASE("commutes with the exterior derivative") {
        GridSpec spec{3, 4, 4, 1.0, 1.2, 0.8, AxialTopology::periodic};
        const auto g = CylinderGrid::cylinder(spec);
        const auto x = VectorFieldSample::sample(g, [](const Eigen::Vector3d& p) {
            return Eigen::Vector3d(0.0, 0.0, 1.0 + 0.5 * std::sin(2 * kPi * p.z()));
        });
        for (int k = 0; k < 3; ++k) {
            const Cochain w = random_cochain(rng, g, k);
            const Cochain a = exterior_derivative(lie_derivative(x, w), Variant::full);
            const Cochain b = lie_derivative(x, exterior_derivative(w, Variant::full));
            CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() <= 1e-12);
        }
    }
}

TEST_CASE("covariant derivative on the flat metric") {
    auto rng = std::mt19937_64(41);

    SUBCASE("zero field gives zero") {
        const auto g = CylinderGrid::torus3(3, 3, 3, 1, 1, 1);
        const Cochain w = random_cochain(rng, g, 1);
        CHECK(covariant_derivative(VectorFieldSample::zero(g), w).values.norm() == 0.0);
    }

    SUBCASE("constant axial field is the central shift difference") {
        GridSpec spec{3, 3, 6, 1, 1, 1, AxialTopology::periodic};
        const auto g = CylinderGrid::cylinder(spec);
        const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
        for (int degree = 0; degree <= 3; ++degree) {
            const Cochain w = random_cochain(rng, g, degree);
            const Cochain dv = covariant_derivative(e3, w);
            // independent stencil: (w(z+1) - w(z-1)) / (2 hz) with wrap
            const double hz = g.spacing(2);
            for (int t = 0; t < CylinderGrid::type_count(degree); ++t)
                for (int k = 0; k < g.extent(degree, t, 2); ++k)
                    for (int j = 0; j < g.extent(degree, t, 1); ++j)
                        for (int i = 0; i < g.extent(degree, t, 0); ++i) {
                            const int ext = g.extent(degree, t, 2);
                            const int up = (k + 1) % ext, down = (k + ext - 1) % ext;
                            const double expect = (w.values(g.cell_index(degree, t, i, j, up)) -
                                                   w.values(g.cell_index(degree, t, i, j, down))) /
                                                  (2 * hz);
                            CHECK(dv.values(g.cell_index(degree, t, i, j, k)) ==
                                  doctest::Approx(expect).epsilon(1e-14));
                        }
        }
    }

    SUBCASE("affine data differentiates exactly in the interior") {
        GridSpec spec{3, 3, 8, 1, 1, 2, AxialTopology::truncated};
        const auto g = CylinderGrid::cylinder(spec);
        const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
        const Cochain w =
            Cochain::sample(g, 0, [](const Eigen::Vector3d& p, int) { return 3.0 * p.z(); });
        const Cochain dv = covariant_derivative(e3, w);
        for (int i = 0; i < dv.values.size(); ++i)
            CHECK(dv.values(i) == doctest::Approx(3.0).epsilon(1e-13));
    }

    SUBCASE("lie and covariant derivatives agree under refinement for constant fields") {
        std::array<double, 2> errs{};
        for (int level = 0; level < 2; ++level) {
            GridSpec spec{3, 3, 6 << level, 1, 1, 1, AxialTopology::truncated};
            const auto g = CylinderGrid::cylinder(spec);
            const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
            auto f = [&](const Eigen::Vector3d& p, int dirs) {
                return std::cos(kPi * p.z()) * (1 + 0.1 * dirs);
            };
            const Cochain w = Cochain::sample(g, 1, f);
            Cochain diff = lie_derivative(e3, w);
            diff.values -= covariant_derivative(e3, w).values;
            errs[level] = norm(diff);
        }
        const bool exact = errs[0] <= 1e-13 && errs[1] <= 1e-13;
        if (!exact) CHECK(std::log2(errs[0] / errs[1]) >= 0.9);
    }
}

TEST_CASE("lie skewness report") {
    SUBCASE("constant axial field on the torus is exactly skew") {
        GridSpec base{4, 4, 4, 1, 1, 1, AxialTopology::periodic};
        const auto report = lie_skew_symmetry_report(
            base, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, 1); }, 2);
        CHECK(report.quasi_skew);
        for (const auto& lv : report.levels)
            for (int k = 0; k <= 3; ++k) CHECK(lv.sym_norm[k] <= 1e-12);
    }

    SUBCASE("zero field") {
        GridSpec base{3, 3, 3, 1, 1, 1, AxialTopology::periodic};
        const auto report = lie_skew_symmetry_report(
            base, [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); }, 1);
        for (int k = 0; k <= 3; ++k) CHECK(report.levels[0].sym_norm[k] == 0.0);
    }

    SUBCASE("variable axial speed stays below the derivative bound") {
        GridSpec base{3, 3, 8, 1, 1, 1, AxialTopology::periodic};
        auto field = [](const Eigen::Vector3d& p) {
            return Eigen::Vector3d(0, 0, 1.0 + 0.5 * std::sin(2 * kPi * p.z()));
        };
        const auto report = lie_skew_symmetry_report(base, field, 2);
        CHECK(report.quasi_skew);
        const double sup_dz = 0.5 * 2 * kPi;  // sup |dX3/dz|
        for (const auto& lv : report.levels)
            for (int k = 0; k <= 3; ++k)
                CHECK(lv.sym_norm[k] <= 0.5 * sup_dz + 3.0 * lv.h);
    }

    SUBCASE("truncated axis requires cap-supported fields") {
        GridSpec base{3, 3, 6, 1, 1, 1, AxialTopology::truncated};
        CHECK_THROWS_AS(lie_skew_symmetry_report(
                            base, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, 1); },
                            1),
                        std::invalid_argument);
        // a bump supported away from the caps is accepted
        auto bump = [](const Eigen::Vector3d& p) {
            const double s = std::sin(kPi * p.z());
            const double w = (p.z() > 0.34 && p.z() < 0.66) ? s * s : 0.0;
            return Eigen::Vector3d(0, 0, w);
        };
        CHECK_NOTHROW(lie_skew_symmetry_report(base, bump, 1));
    }
}

TEST_CASE("constant axial lie matrix is mass skew") {
    GridSpec spec{3, 4, 5, 1.0, 0.8, 1.3, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const auto e3 = VectorFieldSample::constant(g, {0, 0, 1});
    for (int k = 0; k <= 3; ++k) {
        const SparseMatrix lie = lie_derivative_matrix(e3, k);
        CHECK(skew_adjointness_defect(lie, g.mass(k)) <= 1e-12);
    }
}

TEST_CASE("cochain binary round trip") {
    const auto g = CylinderGrid::torus3(3, 3, 3, 1, 1, 1);
    auto rng = std::mt19937_64(43);
    const Cochain c = random_cochain(rng, g, 2);
    std::stringstream buf;
    write_cochain(buf, c);
    const Cochain back = read_cochain(buf, g);
    CHECK(back.degree == c.degree);
    CHECK((back.values - c.values).norm() == 0.0);

    const auto other = CylinderGrid::torus3(4, 3, 3, 1, 1, 1);
    std::stringstream buf2;
    write_cochain(buf2, c);
    CHECK_THROWS_AS(read_cochain(buf2, other), std::runtime_error);
}
