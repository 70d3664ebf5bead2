#pragma once

#include "driftwave/time_integrator.hpp"

#include <functional>
#include <optional>

namespace driftwave::evo {

// Midpoint forcing: fills `out` (stacked length) with F(t).  A null function
// means no forcing.
using Forcing = std::function<void(double t, Eigen::VectorXd& out)>;

// A point on the trajectory: the k-form and (k+1)-form components of the
// stacked state, with the time they belong to.
struct StateVector {
    dec::Cochain u;
    dec::Cochain w;
    double time = 0.0;

    static StateVector split(const EvoSystem& system, const Eigen::VectorXd& stacked,
                             double time);
    Eigen::VectorXd stacked() const;
};

struct SimulationOptions {
    double dt = 0.01;
    double t_final = 1.0;
    double rho = 0.0;  // diagnostic weight; enters no stepping decision
    int snapshot_every = 0;
    bool track_support = false;
    Eigen::Vector3d source_position = Eigen::Vector3d::Zero();
    double support_threshold = 1e-9;  // relative to the max field amplitude
};

struct TrajectoryRow {
    int step = 0;
    double time = 0.0;
    double energy = 0.0;
    double weighted_norm = 0.0;   // exp(-rho t) ||x||_H
    double support_radius = 0.0;  // -1 when tracking is off
};

struct SimulationResult {
    std::vector<TrajectoryRow> rows;
    Eigen::VectorXd final_state;
    std::vector<std::pair<int, Eigen::VectorXd>> snapshots;

    // accumulated weighted space-time norms (states at nodes, forces at
    // midpoints) and the solution-operator bound they are checked against
    double weighted_state_norm = 0.0;
    double weighted_force_norm = 0.0;
    double bound_constant = 0.0;  // rho c0 - ||sym M1~||
    double weighted_ratio = 0.0;
    bool weighted_bound_ok = true;

    // causality diagnostic: radius - ((1 + max|X0|) t + 3 h), max over steps
    double max_support_excess = 0.0;
    bool causal = true;
};

// Integrates the system from the given initial state (zero when empty) and
// collects the diagnostics.  The exponential weight is diagnostic-only: two
// runs differing only in rho produce bitwise identical states.
SimulationResult simulate(const EvoSystem& system, const SimulationOptions& options,
                          const Forcing& forcing = nullptr,
                          const Eigen::VectorXd& initial = Eigen::VectorXd());

// Per-dof field amplitude scale (cochain value / primal volume), used by the
// support scan so different degrees compare fairly.
Eigen::VectorXd field_normalizers(const EvoSystem& system);

// Distance from the source respecting periodic axes.
double periodic_distance(const CylinderGrid& grid, const Eigen::Vector3d& a,
                         const Eigen::Vector3d& b);

}  // namespace driftwave::evo
