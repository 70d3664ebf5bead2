#pragma once

#include "driftwave/field_expr.hpp"
#include "driftwave/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

// Plain-text run description.  Grammar: `key = value` lines, sections in
// brackets, `#` starts a comment.  Keys outside any section are top level.
// Unknown keys are rejected with a nearest-key suggestion; validation
// collects every violated constraint before reporting.

namespace driftwave::cfg {

enum class Mode { verify_operators, verify_calculus, simulate_manifold, simulate_cartesian };

const char* to_string(Mode m);

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& origin, std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

struct ScenarioConfig {
    Mode mode = Mode::verify_operators;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    // [grid]
    int nx = 8, ny = 8, nz = 8;
    double lx = 1.0, ly = 1.0, lz = 1.0;
    dec::AxialTopology axial = dec::AxialTopology::periodic;

    // [scenario]
    int degree = 0;
    double mach = 0.0;       // constant axial drift speed
    bool transform = false;  // absorb the drift into the material block
    bool has_x0 = false;
    FieldExpr x0[3];         // overrides mach when present
    FieldExpr alpha;         // defaults to 1
    FieldExpr m0_u, m0_w;    // diagonal material weights, default 1
    FieldExpr m1_u, m1_w;    // bounded material weights, default 0
    double dt = 0.01;
    double t_final = 1.0;
    double rho = 0.0;  // 0: use 2 rho0 from the assembled system

    // cartesian initial data
    std::string init = "zero";  // zero | random | mode
    Eigen::Vector3i init_mode{0, 0, 1};
    std::vector<Eigen::Vector3i> monitor_modes;
    bool residual = false;

    // [source]
    std::string source_kind = "none";  // none | point | field
    FieldExpr source_space;
    FieldExpr source_time;  // defaults to 1
    bool source_pos_auto = true;
    Eigen::Vector3d source_pos = Eigen::Vector3d::Zero();
    double source_amplitude = 1.0;

    // [output]
    int snapshots_every = 0;

    // [verify]
    int cases = 200;
    double eta0 = 0.5;
};

ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace driftwave::cfg
