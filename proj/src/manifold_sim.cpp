#include "driftwave/manifold_sim.hpp"

#include <cmath>

namespace driftwave::evo {

StateVector StateVector::split(const EvoSystem& system, const Eigen::VectorXd& stacked,
                               double time) {
    if (stacked.size() != system.size())
        throw std::invalid_argument("StateVector::split: stacked size mismatch");
    StateVector s;
    s.u = {system.degree, false, system.grid, stacked.head(system.size_u)};
    s.w = {system.degree + 1, false, system.grid, stacked.tail(system.size_w)};
    s.time = time;
    return s;
}

Eigen::VectorXd StateVector::stacked() const {
    Eigen::VectorXd x(u.values.size() + w.values.size());
    x << u.values, w.values;
    return x;
}

Eigen::VectorXd field_normalizers(const EvoSystem& system) {
    const CylinderGrid& g = *system.grid;
    Eigen::VectorXd scale(system.size());
    int offset = 0;
    for (int degree : {system.degree, system.degree + 1}) {
        for (int t = 0; t < CylinderGrid::type_count(degree); ++t) {
            const int dirs = CylinderGrid::type_dirs(degree, t);
            double volume = 1.0;
            for (int a = 0; a < 3; ++a)
                if (dirs & (1 << a)) volume *= g.spacing(a);
            const int begin = offset + g.type_offset(degree, t);
            for (int i = 0; i < g.type_size(degree, t); ++i) scale(begin + i) = volume;
        }
        offset += g.cells(degree);
    }
    return scale;
}

double periodic_distance(const CylinderGrid& grid, const Eigen::Vector3d& a,
                         const Eigen::Vector3d& b) {
    Eigen::Vector3d d = (a - b).cwiseAbs();
    for (int axis = 0; axis < 3; ++axis)
        if (grid.periodic(axis))
            d(axis) = std::min(d(axis), grid.length(axis) - d(axis));
    return d.norm();
}

SimulationResult simulate(const EvoSystem& system, const SimulationOptions& options,
                          const Forcing& forcing, const Eigen::VectorXd& initial) {
    if (!(options.t_final >= options.dt))
        throw std::invalid_argument("simulate: t_final must be at least one step");
    const int n = system.size();
    Eigen::VectorXd x = initial.size() ? initial : Eigen::VectorXd::Zero(n);
    if (x.size() != n) throw std::invalid_argument("simulate: initial state size mismatch");

    const ImplicitMidpoint stepper(system, options.dt);
    const int steps = static_cast<int>(std::llround(options.t_final / options.dt));

    SimulationResult result;
    result.rows.reserve(steps + 1);

    Eigen::VectorXd normalizer;
    std::vector<Eigen::Vector3d> centers;
    if (options.track_support) {
        normalizer = field_normalizers(system);
        centers.resize(n);
        for (int i = 0; i < system.size_u; ++i)
            centers[i] = system.grid->cell_center(system.degree, i);
        for (int i = 0; i < system.size_w; ++i)
            centers[system.size_u + i] = system.grid->cell_center(system.degree + 1, i);
    }

    const double h = system.grid->max_spacing();
    double state_acc = 0.0, force_acc = 0.0;
    Eigen::VectorXd f_mid(n);

    auto record = [&](int step, double t) {
        TrajectoryRow row;
        row.step = step;
        row.time = t;
        row.energy = system.energy(x);
        row.weighted_norm = std::exp(-options.rho * t) * system.h_norm(x);
        row.support_radius = -1.0;
        if (options.track_support) {
            double max_amp = 0.0;
            for (int i = 0; i < n; ++i)
                max_amp = std::max(max_amp, std::abs(x(i)) / normalizer(i));
            double radius = 0.0;
            if (max_amp > 0.0) {
                const double threshold = options.support_threshold * max_amp;
                for (int i = 0; i < n; ++i)
                    if (std::abs(x(i)) / normalizer(i) > threshold)
                        radius = std::max(radius, periodic_distance(*system.grid, centers[i],
                                                                    options.source_position));
            }
            row.support_radius = radius;
            const double allowed = (1.0 + system.max_drift_speed) * t + 3.0 * h;
            result.max_support_excess = std::max(result.max_support_excess, radius - allowed);
        }
        result.rows.push_back(row);
    };

    record(0, 0.0);
    for (int s = 1; s <= steps; ++s) {
        const double t_mid = (s - 0.5) * options.dt;
        if (forcing) {
            f_mid.setZero();
            forcing(t_mid, f_mid);
        } else {
            f_mid.resize(0);
        }
        x = stepper.step(x, f_mid);
        const double t = s * options.dt;
        record(s, t);

        state_acc += std::exp(-2.0 * options.rho * t) * system.mass.dot(x.cwiseProduct(x)) *
                     options.dt;
        if (forcing)
            force_acc += std::exp(-2.0 * options.rho * t_mid) *
                         system.mass.dot(f_mid.cwiseProduct(f_mid)) * options.dt;

        if (options.snapshot_every > 0 && s % options.snapshot_every == 0)
            result.snapshots.emplace_back(s, x);
    }

    result.final_state = std::move(x);
    result.weighted_state_norm = std::sqrt(state_acc);
    result.weighted_force_norm = std::sqrt(force_acc);
    result.bound_constant = options.rho * system.c0 - system.m1_tilde_sym_norm;
    if (force_acc > 0.0 && result.bound_constant > 0.0) {
        result.weighted_ratio = result.weighted_state_norm / result.weighted_force_norm;
        result.weighted_bound_ok =
            result.weighted_ratio <= 1.05 / result.bound_constant;
    }
    result.causal = result.max_support_excess <= 0.0;
    return result;
}

}  // namespace driftwave::evo
