#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "driftwave/manifold_sim.hpp"
#include "driftwave/sparse_norms.hpp"

#include <cmath>
#include <cstring>
#include <random>

using namespace driftwave;
using namespace driftwave::evo;
using dec::AxialTopology;
using dec::CylinderGrid;
using dec::GridSpec;
using dec::VectorFieldSample;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd random_state(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = dist(rng);
    return x;
}

DriftSpec axial_drift(const CylinderGrid& g, double speed = 1.0) {
    return DriftSpec::make(
        g, [speed](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, speed); },
        [](const Eigen::Vector3d&) { return 1.0; });
}

}  // namespace

TEST_CASE("exterior block is skew under the product mass inner product") {
    for (auto axial : {AxialTopology::periodic, AxialTopology::truncated}) {
        GridSpec spec{4, 4, 4, 1.0, 1.2, 0.9, axial};
        const auto g = CylinderGrid::cylinder(spec);
        for (int k = 0; k < 3; ++k) {
            const auto block = assemble_exterior_block(g, k);
            Eigen::VectorXd mass(g.cells(k) + g.cells(k + 1));
            mass << g.mass(k), g.mass(k + 1);
            CHECK(skew_adjointness_defect(block, mass) <= 1e-12);
        }
    }
}

TEST_CASE("degree-0 exterior block matches hand-coded gradient and divergence") {
    const auto g = CylinderGrid::torus3(5, 4, 3, 1.0, 0.8, 1.2);
    const auto block = assemble_exterior_block(g, 0);
    const int nu = g.cells(0), nw = g.cells(1);

    auto rng = std::mt19937_64(7);
    Eigen::VectorXd state = random_state(rng, nu + nw);
    const Eigen::VectorXd out = block * state;

    // gradient rows: edge value = head vertex - tail vertex
    for (int t = 0; t < 3; ++t) {
        const int axis = t;
        for (int k = 0; k < g.extent(1, t, 2); ++k)
            for (int j = 0; j < g.extent(1, t, 1); ++j)
                for (int i = 0; i < g.extent(1, t, 0); ++i) {
                    int head[3] = {i, j, k};
                    head[axis] = (head[axis] + 1) % g.n(axis);
                    const double expect = state(g.cell_index(0, 0, head[0], head[1], head[2])) -
                                          state(g.cell_index(0, 0, i, j, k));
                    CHECK(out(nu + g.cell_index(1, t, i, j, k)) ==
                          doctest::Approx(expect).epsilon(1e-14));
                }
    }

    // -d* rows recover the staggered divergence of the edge field
    const double h[3] = {g.spacing(0), g.spacing(1), g.spacing(2)};
    for (int k = 0; k < g.n(2); ++k)
        for (int j = 0; j < g.n(1); ++j)
            for (int i = 0; i < g.n(0); ++i) {
                double div = 0.0;
                const int c[3] = {i, j, k};
                for (int axis = 0; axis < 3; ++axis) {
                    int lo[3] = {c[0], c[1], c[2]};
                    lo[axis] = (lo[axis] + g.n(axis) - 1) % g.n(axis);
                    const double w_hi =
                        state(nu + g.cell_index(1, axis, c[0], c[1], c[2])) / h[axis];
                    const double w_lo =
                        state(nu + g.cell_index(1, axis, lo[0], lo[1], lo[2])) / h[axis];
                    div += (w_hi - w_lo) / h[axis];
                }
                CHECK(out(g.cell_index(0, 0, i, j, k)) ==
                      doctest::Approx(div).epsilon(1e-12));
            }

    CHECK((block * Eigen::VectorXd::Zero(nu + nw)).norm() == 0.0);
}

TEST_CASE("drift decomposition") {
    GridSpec spec{4, 4, 6, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const int n = g.cells(0) + g.cells(1);
    Eigen::VectorXd mass(n);
    mass << g.mass(0), g.mass(1);

    SUBCASE("zero multiplier kills everything") {
        auto drift = DriftSpec::make(
            g, [](const Eigen::Vector3d&) { return Eigen::Vector3d(0, 0, 1); },
            [](const Eigen::Vector3d&) { return 0.0; });
        const auto dec0 = assemble_drift_decomposition(g, 0, drift, Eigen::VectorXd::Ones(n));
        CHECK(sparse_spectral_norm(dec0.c_sym) == 0.0);
        CHECK(sparse_spectral_norm(dec0.d_skew) == 0.0);
        CHECK(sparse_spectral_norm(dec0.remainder) == 0.0);
    }

    SUBCASE("constant axial drift is purely skew with no remainder") {
        const auto drift = axial_drift(g);
        const auto d = assemble_drift_decomposition(g, 0, drift, Eigen::VectorXd::Ones(n));
        CHECK(sparse_weighted_norm(d.c_sym, mass) <= 1e-12);
        CHECK(sparse_weighted_norm(d.remainder, mass) <= 1e-12);
        // D equals the blockwise central axial difference
        CHECK(sparse_spectral_norm(SparseMatrix(d.d_skew - d.l_block)) <= 1e-12);
        auto rng = std::mt19937_64(13);
        const Eigen::VectorXd x = random_state(rng, n);
        const Eigen::VectorXd dx = d.d_skew * x;
        const double hz = g.spacing(2);
        // degree-0 rows: (x(z+1) - x(z-1)) / (2 hz)
        for (int k = 0; k < g.extent(0, 0, 2); ++k)
            for (int j = 0; j < g.extent(0, 0, 1); ++j)
                for (int i = 0; i < g.extent(0, 0, 0); ++i) {
                    const int up = (k + 1) % g.n(2), down = (k + g.n(2) - 1) % g.n(2);
                    const double expect = (x(g.cell_index(0, 0, i, j, up)) -
                                           x(g.cell_index(0, 0, i, j, down))) /
                                          (2 * hz);
                    CHECK(dx(g.cell_index(0, 0, i, j, k)) ==
                          doctest::Approx(expect).epsilon(1e-13));
                }
    }

    SUBCASE("variable axial speed: sym part bounded by the derivative sup") {
        const double sup_dz = 0.5 * 2 * kPi;
        std::array<double, 2> norms{};
        for (int level = 0; level < 2; ++level) {
            GridSpec s2{4, 4, 8 << level, 1, 1, 1, AxialTopology::periodic};
            const auto g2 = CylinderGrid::cylinder(s2);
            const int n2 = g2.cells(0) + g2.cells(1);
            auto drift = DriftSpec::make(
                g2,
                [](const Eigen::Vector3d& p) {
                    return Eigen::Vector3d(0, 0, 1.0 + 0.5 * std::sin(2 * kPi * p.z()));
                },
                [](const Eigen::Vector3d&) { return 1.0; });
            const auto d =
                assemble_drift_decomposition(g2, 0, drift, Eigen::VectorXd::Ones(n2));
            Eigen::VectorXd mass2(n2);
            mass2 << g2.mass(0), g2.mass(1);
            norms[level] = sparse_weighted_norm(d.c_sym, mass2);
            CHECK(norms[level] <= 0.5 * sup_dz + 3.0 * g2.max_spacing());
        }
        // bounded across refinement: the discrete norm approaches the
        // multiplier bound sup|dX3/dz|/2 from below
        CHECK(std::abs(norms[1] - 0.5 * sup_dz) <= std::abs(norms[0] - 0.5 * sup_dz) + 1e-9);
    }
}

TEST_CASE("M1 tilde assembly and the admissible weight") {
    GridSpec spec{4, 4, 4, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const int n = g.cells(0) + g.cells(1);

    SUBCASE("all drift terms zero reproduces M1") {
        auto drift = DriftSpec::make(
            g, [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); },
            [](const Eigen::Vector3d&) { return 1.0; });
        const auto dec0 = assemble_drift_decomposition(g, 0, drift, Eigen::VectorXd::Ones(n));
        SparseMatrix m1(n, n);
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, 0.25 * std::cos(1.0 + i));
        m1.setFromTriplets(trips.begin(), trips.end());
        Eigen::VectorXd mass(n);
        mass << g.mass(0), g.mass(1);
        const auto result = assemble_m1_tilde(m1, dec0, mass, 1.0);
        CHECK(sparse_spectral_norm(SparseMatrix(result.m1_tilde - m1)) == 0.0);
    }

    SUBCASE("flat constant drift gives vanishing M1 tilde and rho0 = 1/c") {
        const auto drift = axial_drift(g);
        const auto sys = assemble_system(g, 0, drift, Eigen::VectorXd(), SparseMatrix());
        CHECK(sys.m1_tilde_norm <= 1e-12);
        CHECK(sys.rho0 == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(sys.c0 == 1.0);
        // stored-weight margin: rho0 c0 - ||M1~|| = 1
        CHECK(sys.rho0 * sys.c0 - sys.m1_tilde_norm >= 1.0 - 1e-10);
    }

    SUBCASE("generic scenario keeps the unit margin") {
        auto drift = DriftSpec::make(
            g,
            [](const Eigen::Vector3d& p) {
                return Eigen::Vector3d(0, 0, 1.0 + 0.5 * std::sin(2 * kPi * p.z()));
            },
            [](const Eigen::Vector3d& p) { return 1.0 + 0.25 * std::cos(2 * kPi * p.z()); });
        Eigen::VectorXd m0 = Eigen::VectorXd::Ones(n);
        for (int i = 0; i < n; ++i) m0(i) += 0.3 * std::sin(0.1 * i);
        const auto sys = assemble_system(g, 0, drift, m0, SparseMatrix());
        CHECK(sys.rho0 * sys.c0 - sys.m1_tilde_sym_norm >= 1.0 - 1e-10);
        CHECK(sys.rho0 * sys.c0 - sys.m1_tilde_norm >= 1.0 - 1e-10);
        CHECK(sys.skew_defect <= 1e-10);
    }
}

TEST_CASE("implicit midpoint stepping") {
    GridSpec spec{6, 6, 6, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const auto sys = assemble_system(g, 0, axial_drift(g), Eigen::VectorXd(), SparseMatrix());

    SUBCASE("zero stays zero") {
        const ImplicitMidpoint stepper(sys, 0.02);
        const Eigen::VectorXd x = stepper.step(Eigen::VectorXd::Zero(sys.size()),
                                               Eigen::VectorXd());
        CHECK(x.norm() == 0.0);
    }

    SUBCASE("energy is conserved for the skew generator") {
        auto rng = std::mt19937_64(17);
        Eigen::VectorXd x = random_state(rng, sys.size());
        const double e0 = sys.energy(x);
        const ImplicitMidpoint stepper(sys, 0.02);
        for (int s = 0; s < 200; ++s) x = stepper.step(x, Eigen::VectorXd());
        CHECK(std::abs(sys.energy(x) - e0) / e0 <= 1e-11);
    }

    SUBCASE("one step vs two half steps is third-order small") {
        auto rng = std::mt19937_64(19);
        const Eigen::VectorXd x0 = random_state(rng, sys.size());
        auto local_error = [&](double dt) {
            const ImplicitMidpoint full(sys, dt), half(sys, dt / 2);
            const Eigen::VectorXd a = full.step(x0, Eigen::VectorXd());
            const Eigen::VectorXd b =
                half.step(half.step(x0, Eigen::VectorXd()), Eigen::VectorXd());
            return (a - b).norm();
        };
        const double d1 = local_error(0.02);
        const double d2 = local_error(0.01);
        CHECK(d1 / d2 >= 5.5);
        CHECK(d1 / d2 <= 11.0);
    }

    SUBCASE("invalid dt") {
        CHECK_THROWS_AS(ImplicitMidpoint(sys, 0.0), std::invalid_argument);
    }
}

TEST_CASE("dissipativity with a positive bounded part") {
    GridSpec spec{6, 6, 6, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const double sigma = 0.3;
    const int n = g.cells(0) + g.cells(1);
    SparseMatrix m1(n, n);
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, sigma);
        m1.setFromTriplets(trips.begin(), trips.end());
    }
    const auto sys = assemble_system(g, 0, axial_drift(g), Eigen::VectorXd(), m1);
    CHECK(sys.m1_tilde_sym_norm == doctest::Approx(sigma).epsilon(1e-9));

    // plain energy is strictly non-increasing at any dt; the exactly
    // exponentially reweighted energy is non-increasing up to a second-order
    // defect of the midpoint rule, which refines away at O(dt^2)
    auto weighted_growth = [&](double dt) {
        auto rng = std::mt19937_64(31);
        Eigen::VectorXd x = random_state(rng, sys.size());
        const ImplicitMidpoint stepper(sys, dt);
        double e_prev = sys.energy(x);
        double weighted_prev = e_prev;
        double worst = 0.0;
        const int steps = static_cast<int>(std::llround(0.4 / dt));
        for (int s = 1; s <= steps; ++s) {
            x = stepper.step(x, Eigen::VectorXd());
            const double e = sys.energy(x);
            CHECK(e <= e_prev * (1.0 + 1e-12));
            e_prev = e;
            const double weighted = std::exp(2.0 * sigma * s * dt) * e;
            worst = std::max(worst, weighted / weighted_prev - 1.0);
            weighted_prev = weighted;
        }
        return worst;
    };
    const double coarse = weighted_growth(0.02);
    const double fine = weighted_growth(0.01);
    CHECK(coarse < 1e-3);
    CHECK(fine <= coarse / 3.0);
}

TEST_CASE("state vector splits and restacks") {
    GridSpec spec{3, 3, 3, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const auto sys = assemble_system(g, 1, axial_drift(g), Eigen::VectorXd(), SparseMatrix());
    auto rng = std::mt19937_64(37);
    const Eigen::VectorXd x = random_state(rng, sys.size());
    const auto state = StateVector::split(sys, x, 2.5);
    CHECK(state.u.degree == 1);
    CHECK(state.w.degree == 2);
    CHECK(state.time == 2.5);
    CHECK((state.stacked() - x).norm() == 0.0);
}

TEST_CASE("simulate diagnostics") {
    GridSpec spec{6, 6, 6, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const auto sys = assemble_system(g, 0, axial_drift(g), Eigen::VectorXd(), SparseMatrix());

    SUBCASE("zero forcing gives the zero trajectory") {
        SimulationOptions opt;
        opt.dt = 0.05;
        opt.t_final = 0.5;
        const auto result = simulate(sys, opt);
        for (const auto& row : result.rows) CHECK(row.energy == 0.0);
        CHECK(result.final_state.norm() == 0.0);
    }

    SUBCASE("weighted solution bound holds at rho = 2 rho0") {
        auto rng = std::mt19937_64(23);
        const Eigen::VectorXd profile = random_state(rng, sys.size());
        SimulationOptions opt;
        opt.dt = 0.01;
        opt.t_final = 1.0;
        opt.rho = 2.0 * sys.rho0;
        const auto result = simulate(sys, opt, [&](double t, Eigen::VectorXd& f) {
            f = std::sin(kPi * t) * profile;
        });
        CHECK(result.bound_constant == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(result.weighted_ratio > 0.0);
        CHECK(result.weighted_bound_ok);
    }

    SUBCASE("the weight is diagnostic only: states agree bitwise across rho") {
        auto rng = std::mt19937_64(29);
        const Eigen::VectorXd profile = random_state(rng, sys.size());
        auto run = [&](double rho) {
            SimulationOptions opt;
            opt.dt = 0.02;
            opt.t_final = 0.4;
            opt.rho = rho;
            return simulate(sys, opt, [&](double t, Eigen::VectorXd& f) {
                f = std::cos(2 * t) * profile;
            });
        };
        const auto a = run(sys.rho0);
        const auto b = run(3.7 * sys.rho0);
        REQUIRE(a.final_state.size() == b.final_state.size());
        CHECK(std::memcmp(a.final_state.data(), b.final_state.data(),
                          sizeof(double) * a.final_state.size()) == 0);
        for (std::size_t i = 0; i < a.rows.size(); ++i)
            CHECK(a.rows[i].energy == b.rows[i].energy);
        // the weighted diagnostic itself differs
        CHECK(a.weighted_state_norm != b.weighted_state_norm);
    }

    SUBCASE("support scan reports a radius and snapshots are recorded") {
        SimulationOptions opt;
        opt.dt = 0.01;
        opt.t_final = 0.1;
        opt.track_support = true;
        opt.snapshot_every = 5;
        opt.source_position = Eigen::Vector3d(0.5, 0.5, 0.5);
        // point source at the center vertex
        const int center = g.cell_index(0, 0, 3, 3, 3);
        const auto result = simulate(sys, opt, [&](double t, Eigen::VectorXd& f) {
            f(center) = (t < 0.05) ? 1.0 : 0.0;
        });
        CHECK(result.rows.front().support_radius == 0.0);
        CHECK(result.rows.back().support_radius > 0.0);
        CHECK(result.snapshots.size() == 2);
    }
}

TEST_CASE("assembly validation") {
    GridSpec spec{3, 3, 3, 1, 1, 1, AxialTopology::periodic};
    const auto g = CylinderGrid::cylinder(spec);
    const int n = g.cells(0) + g.cells(1);
    CHECK_THROWS_AS(assemble_system(g, 0, axial_drift(g), -Eigen::VectorXd::Ones(n),
                                    SparseMatrix()),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_exterior_block(g, 3), std::invalid_argument);
}
