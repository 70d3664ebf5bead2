#pragma once

#include "driftwave/bi_isotropic.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

// Four-field acoustic system (p, v1, v2, v3) with a constant axial drift,
//
//   d/dt U + [[v0 d3, d1, d2, d3],
//             [d1, v0 d3, 0, 0 ],
//             [d2, 0, v0 d3, 0 ],
//             [d3, 0, 0, v0 d3]] U = (f, 0, 0, 0),
//
// on a fully periodic box.  The spatial operator diagonalizes over Fourier
// modes into i times a real symmetric 4x4 symbol, so it is exactly
// skew-adjoint for every drift speed; time stepping is the implicit midpoint
// rule applied per mode (a Cayley rotation), which keeps the energy constant
// to rounding for arbitrary v0.  Odd derivatives at the Nyquist index use the
// zero-frequency convention so real fields stay real.

namespace driftwave::cart {

struct CartesianGridSpec {
    int nx = 16, ny = 16, nz = 16;
    double lx = 1.0, ly = 1.0, lz = 1.0;
};

struct CartesianScenario {
    CartesianGridSpec grid;
    double v0 = 0.0;
    double dt = 1e-3;
    double t_final = 1.0;
    std::uint64_t seed = 0;

    enum class Init { zero, random, mode };
    Init init = Init::zero;
    Eigen::Vector3i init_mode{0, 0, 1};

    std::function<double(const Eigen::Vector3d&)> force_space;  // null: no forcing
    std::function<double(double)> force_time;                   // null: constant 1

    std::vector<Eigen::Vector3i> monitor_modes;
    bool second_order_residual = false;
    int record_stride = 1;
};

struct DispersionRow {
    Eigen::Vector3i mode;
    Eigen::Vector3d k;
    int branch = 0;
    double freq_numeric = 0.0;
    double freq_analytic = 0.0;
    double rel_error = 0.0;
};

struct CartesianResult {
    std::vector<double> time;
    std::vector<double> energy;
    double energy_initial = 0.0;
    double energy_min = 0.0;
    double energy_max = 0.0;

    std::vector<DispersionRow> dispersion;

    std::vector<double> residual_time;
    std::vector<double> residual_norm;  // volume-weighted L2 per interior level

    Eigen::MatrixXd final_fields;  // 4 x N, physical space
    double max_imaginary = 0.0;    // reality defect of the final fields
};

// Symbol frequencies {v0 k3 - |k|, v0 k3, v0 k3, v0 k3 + |k|} in ascending
// order, matching the eigenvalues of the Hermitian symbol.
Eigen::Vector4d analytic_symbol_frequencies(const Eigen::Vector3d& k, double v0);

CartesianResult friedrichs_cartesian_simulate(const CartesianScenario& scenario);

}  // namespace driftwave::cart
