#include "driftwave/runner.hpp"

#include "driftwave/cartesian_sim.hpp"
#include "driftwave/csv.hpp"
#include "driftwave/manifold_sim.hpp"
#include "driftwave/operator_algebra.hpp"
#include "driftwave/verification.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

namespace driftwave {

namespace {

namespace fs = std::filesystem;
using cfg::Mode;
using cfg::ScenarioConfig;
using io::format_double;

std::ofstream open_artifact(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create artifact " + (dir / name).string());
    return out;
}

dec::GridSpec grid_spec_of(const ScenarioConfig& c) {
    return {c.nx, c.ny, c.nz, c.lx, c.ly, c.lz, c.axial};
}

int run_verify(const ScenarioConfig& config, std::ostream& log) {
    verify::VerificationReport report;
    if (config.mode == Mode::verify_operators)
        report = verify::run_operator_identity_suite(config.seed, config.cases, config.eta0);
    else
        report = verify::run_calculus_suite(grid_spec_of(config), config.seed);

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    {
        auto txt = open_artifact(dir, "report.txt");
        verify::write_report_text(txt, report);
    }
    {
        auto csv = open_artifact(dir, "report.csv");
        verify::write_report_csv(csv, report);
    }
    verify::write_report_text(log, report);
    log << "elapsed: " << format_double(report.elapsed_seconds) << " s\n";
    return report.all_passed() ? kExitOk : kExitCheckFailure;
}

int run_manifold(const ScenarioConfig& config, std::ostream& log) {
    const dec::CylinderGrid grid = dec::CylinderGrid::cylinder(grid_spec_of(config));

    double m0_scale = 1.0;
    double drift_speed_scale = 1.0;
    if (config.transform) {
        // absorb the constant axial drift into the material block; valid only
        // below Mach one, which is exactly what the eigenvalue check reports
        const auto material = cart::bi_isotropic_material(config.mach);
        log << "transform material eigenvalues:";
        for (int i = 0; i < 4; ++i) log << ' ' << format_double(material.eigenvalues(i));
        log << '\n';
        if (material.indefinite) {
            log << "transform material block is indefinite for |mach| > 1; "
                   "the transformed formulation is not well-posed (use the direct mode)\n";
            return kExitNumerical;
        }
        m0_scale = 1.0 / (1.0 - config.mach * config.mach);
        drift_speed_scale = 0.0;
    }

    auto x0_field = [&](const Eigen::Vector3d& p) -> Eigen::Vector3d {
        if (config.has_x0)
            return drift_speed_scale *
                   Eigen::Vector3d(config.x0[0].eval(p.x(), p.y(), p.z()),
                                   config.x0[1].eval(p.x(), p.y(), p.z()),
                                   config.x0[2].eval(p.x(), p.y(), p.z()));
        return {0.0, 0.0, config.mach * drift_speed_scale};
    };
    auto alpha_field = [&](const Eigen::Vector3d& p) {
        return config.alpha.eval(p.x(), p.y(), p.z());
    };
    const auto drift = evo::DriftSpec::make(grid, x0_field, alpha_field);

    const int k = config.degree;
    const int nu = grid.cells(k), nw = grid.cells(k + 1);
    Eigen::VectorXd m0(nu + nw);
    Eigen::VectorXd m1(nu + nw);
    for (int i = 0; i < nu; ++i) {
        const Eigen::Vector3d p = grid.cell_center(k, i);
        m0(i) = m0_scale * config.m0_u.eval(p.x(), p.y(), p.z());
        m1(i) = config.m1_u.eval(p.x(), p.y(), p.z());
    }
    for (int i = 0; i < nw; ++i) {
        const Eigen::Vector3d p = grid.cell_center(k + 1, i);
        m0(nu + i) = m0_scale * config.m0_w.eval(p.x(), p.y(), p.z());
        m1(nu + i) = config.m1_w.eval(p.x(), p.y(), p.z());
    }
    dec::SparseMatrix m1_mat(nu + nw, nu + nw);
    {
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < nu + nw; ++i)
            if (m1(i) != 0.0) trips.emplace_back(i, i, m1(i));
        m1_mat.setFromTriplets(trips.begin(), trips.end());
    }

    const auto system = evo::assemble_system(grid, k, drift, m0, m1_mat);

    evo::SimulationOptions options;
    options.dt = config.dt;
    options.t_final = config.t_final;
    options.rho = config.rho > 0.0 ? config.rho : 2.0 * system.rho0;
    options.snapshot_every = config.snapshots_every;
    options.track_support = config.source_kind == "point";
    options.source_position = config.source_pos_auto
                                  ? Eigen::Vector3d(config.lx / 2, config.ly / 2, config.lz / 2)
                                  : config.source_pos;

    evo::Forcing forcing;
    if (config.source_kind == "point") {
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < nu; ++i) {
            const double d = evo::periodic_distance(grid, grid.cell_center(k, i),
                                                    options.source_position);
            if (d < best_dist) {
                best_dist = d;
                best = i;
            }
        }
        options.source_position = grid.cell_center(k, best);
        const double amp = config.source_amplitude;
        const auto& time_profile = config.source_time;
        forcing = [best, amp, &time_profile](double t, Eigen::VectorXd& f) {
            f(best) = amp * time_profile.eval_time(t);
        };
    } else if (config.source_kind == "field") {
        Eigen::VectorXd shape = Eigen::VectorXd::Zero(nu + nw);
        for (int t = 0; t < dec::CylinderGrid::type_count(k); ++t) {
            const int dirs = dec::CylinderGrid::type_dirs(k, t);
            double volume = 1.0;
            for (int a = 0; a < 3; ++a)
                if (dirs & (1 << a)) volume *= grid.spacing(a);
            for (int i = 0; i < grid.type_size(k, t); ++i) {
                const int idx = grid.type_offset(k, t) + i;
                const Eigen::Vector3d p = grid.cell_center(k, idx);
                shape(idx) = config.source_amplitude * volume *
                             config.source_space.eval(p.x(), p.y(), p.z());
            }
        }
        const auto& time_profile = config.source_time;
        forcing = [shape = std::move(shape), &time_profile](double t, Eigen::VectorXd& f) {
            f = time_profile.eval_time(t) * shape;
        };
    }

    const auto result = evo::simulate(system, options, forcing);

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    {
        auto traj = open_artifact(dir, "trajectory.csv");
        io::CsvWriter csv(traj);
        csv.row({"step", "time", "energy", "weighted_norm", "support_radius"});
        for (const auto& row : result.rows)
            csv.row({std::to_string(row.step), format_double(row.time),
                     format_double(row.energy), format_double(row.weighted_norm),
                     format_double(row.support_radius)});
    }
    {
        auto summary = open_artifact(dir, "summary.txt");
        summary << "mode: simulate_manifold\n"
                << "degree: " << k << "\n"
                << "dofs: " << system.size() << " (" << nu << " + " << nw << ")\n"
                << "c0: " << format_double(system.c0) << "\n"
                << "m1_tilde_norm: " << format_double(system.m1_tilde_norm) << "\n"
                << "m1_tilde_sym_norm: " << format_double(system.m1_tilde_sym_norm) << "\n"
                << "rho0: " << format_double(system.rho0) << "\n"
                << "skew_defect: " << format_double(system.skew_defect) << "\n"
                << "rho: " << format_double(options.rho) << "\n"
                << "weighted_state_norm: " << format_double(result.weighted_state_norm) << "\n"
                << "weighted_force_norm: " << format_double(result.weighted_force_norm) << "\n"
                << "weighted_ratio: " << format_double(result.weighted_ratio) << "\n"
                << "bound_constant: " << format_double(result.bound_constant) << "\n"
                << "weighted_bound_ok: " << (result.weighted_bound_ok ? "yes" : "no") << "\n"
                << "max_support_excess: " << format_double(result.max_support_excess) << "\n"
                << "causal: " << (result.causal ? "yes" : "no") << "\n";
    }
    for (const auto& [step, state] : result.snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "state_%06d", step);
        const auto split = evo::StateVector::split(system, state, step * options.dt);
        auto out_u = open_artifact(dir, std::string(name) + "_u.dwc");
        dec::write_cochain(out_u, split.u);
        auto out_w = open_artifact(dir, std::string(name) + "_w.dwc");
        dec::write_cochain(out_w, split.w);
    }

    log << "simulate_manifold finished: " << result.rows.size() - 1 << " steps, final energy "
        << format_double(result.rows.back().energy) << "\n";
    return kExitOk;
}

int run_cartesian(const ScenarioConfig& config, std::ostream& log) {
    if (config.transform) {
        const auto material = cart::bi_isotropic_material(config.mach);
        log << "transform material eigenvalues:";
        for (int i = 0; i < 4; ++i) log << ' ' << format_double(material.eigenvalues(i));
        log << (material.indefinite ? " (indefinite beyond Mach one)" : "") << '\n';
    }

    cart::CartesianScenario scenario;
    scenario.grid = {config.nx, config.ny, config.nz, config.lx, config.ly, config.lz};
    scenario.v0 = config.mach;
    scenario.dt = config.dt;
    scenario.t_final = config.t_final;
    scenario.seed = config.seed;
    scenario.second_order_residual = config.residual;
    scenario.monitor_modes = config.monitor_modes;
    if (config.init == "random")
        scenario.init = cart::CartesianScenario::Init::random;
    else if (config.init == "mode") {
        scenario.init = cart::CartesianScenario::Init::mode;
        scenario.init_mode = config.init_mode;
        if (scenario.monitor_modes.empty()) scenario.monitor_modes.push_back(config.init_mode);
    }
    if (config.source_kind == "field") {
        const auto& space = config.source_space;
        const double amp = config.source_amplitude;
        scenario.force_space = [&space, amp](const Eigen::Vector3d& p) {
            return amp * space.eval(p.x(), p.y(), p.z());
        };
        scenario.force_time = [&profile = config.source_time](double t) {
            return profile.eval_time(t);
        };
    } else if (config.source_kind == "point") {
        // nearest grid point of the periodic box
        const Eigen::Vector3d target =
            config.source_pos_auto ? Eigen::Vector3d(config.lx / 2, config.ly / 2, config.lz / 2)
                                   : config.source_pos;
        const double hx = config.lx / config.nx, hy = config.ly / config.ny,
                     hz = config.lz / config.nz;
        const int ix = static_cast<int>(std::llround(target.x() / hx)) % config.nx;
        const int iy = static_cast<int>(std::llround(target.y() / hy)) % config.ny;
        const int iz = static_cast<int>(std::llround(target.z() / hz)) % config.nz;
        const double amp = config.source_amplitude;
        scenario.force_space = [=](const Eigen::Vector3d& p) {
            const bool hit = std::abs(p.x() - ix * hx) < hx / 2 &&
                             std::abs(p.y() - iy * hy) < hy / 2 &&
                             std::abs(p.z() - iz * hz) < hz / 2;
            return hit ? amp : 0.0;
        };
        scenario.force_time = [&profile = config.source_time](double t) {
            return profile.eval_time(t);
        };
    }

    const auto result = cart::friedrichs_cartesian_simulate(scenario);

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    {
        auto traj = open_artifact(dir, "trajectory.csv");
        io::CsvWriter csv(traj);
        csv.row({"step", "time", "energy"});
        for (std::size_t i = 0; i < result.time.size(); ++i)
            csv.row({std::to_string(i), format_double(result.time[i]),
                     format_double(result.energy[i])});
    }
    if (!result.dispersion.empty()) {
        auto spec = open_artifact(dir, "spectral.csv");
        io::CsvWriter csv(spec);
        csv.row({"k1", "k2", "k3", "freq_numeric", "freq_analytic", "rel_error"});
        for (const auto& row : result.dispersion)
            csv.row({format_double(row.k.x()), format_double(row.k.y()),
                     format_double(row.k.z()), format_double(row.freq_numeric),
                     format_double(row.freq_analytic), format_double(row.rel_error)});
    }
    if (!result.residual_norm.empty()) {
        auto res = open_artifact(dir, "residual.csv");
        io::CsvWriter csv(res);
        csv.row({"time", "residual_l2"});
        for (std::size_t i = 0; i < result.residual_norm.size(); ++i)
            csv.row({format_double(result.residual_time[i]),
                     format_double(result.residual_norm[i])});
    }
    {
        auto summary = open_artifact(dir, "summary.txt");
        summary << "mode: simulate_cartesian\n"
                << "mach: " << format_double(config.mach) << "\n"
                << "energy_initial: " << format_double(result.energy_initial) << "\n"
                << "energy_min: " << format_double(result.energy_min) << "\n"
                << "energy_max: " << format_double(result.energy_max) << "\n"
                << "reality_defect: " << format_double(result.max_imaginary) << "\n";
    }

    if (result.energy_initial > 0.0) {
        const double ratio_hi = result.energy_max / result.energy_initial;
        const double ratio_lo = result.energy_min / result.energy_initial;
        log << "energy ratio over the run: [" << format_double(ratio_lo) << ", "
            << format_double(ratio_hi) << "]\n";
    }
    log << "simulate_cartesian finished: " << result.time.size() - 1 << " recorded steps\n";
    return kExitOk;
}

}  // namespace

int run_scenario(const cfg::ScenarioConfig& config, std::ostream& log) {
    try {
        switch (config.mode) {
            case Mode::verify_operators:
            case Mode::verify_calculus:
                return run_verify(config, log);
            case Mode::simulate_manifold:
                return run_manifold(config, log);
            case Mode::simulate_cartesian:
                return run_cartesian(config, log);
        }
    } catch (const cart::SingularTransformError& e) {
        log << "singular transform: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const evo::SolverError& e) {
        log << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const algebra::SingularOperatorError& e) {
        log << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        log << "invalid scenario: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace driftwave
