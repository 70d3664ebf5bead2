#include "driftwave/scenario_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace driftwave::cfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "mode", "seed", "out",
        "grid.nx", "grid.ny", "grid.nz", "grid.lx", "grid.ly", "grid.lz", "grid.axial",
        "scenario.degree", "scenario.mach", "scenario.transform", "scenario.x0",
        "scenario.alpha", "scenario.m0_u", "scenario.m0_w", "scenario.m1_u",
        "scenario.m1_w", "scenario.dt", "scenario.t_final", "scenario.rho",
        "scenario.init", "scenario.init_mode", "scenario.monitor_modes",
        "scenario.residual",
        "source.kind", "source.space", "source.time", "source.position",
        "source.amplitude",
        "output.snapshots_every",
        "verify.cases", "verify.eta0",
    };
    return keys;
}

std::string suggestion_for(const std::string& key) {
    std::string best;
    int best_distance = 3;  // suggest only close matches
    for (const auto& candidate : known_keys()) {
        const int d = levenshtein(key, candidate);
        if (d < best_distance) {
            best_distance = d;
            best = candidate;
        }
    }
    return best;
}

struct RawConfig {
    std::map<std::string, std::pair<std::string, int>> entries;  // key -> (value, line)
};

RawConfig tokenize(const std::string& text, std::vector<std::string>& issues) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back("line " + std::to_string(line_no) + ": unterminated section");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(line_no) +
                             ": expected `key = value`, got '" + line + "'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (raw.entries.count(key))
            issues.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key +
                             "'");
        raw.entries[key] = {value, line_no};
    }
    return raw;
}

class Extractor {
  public:
    Extractor(RawConfig raw, std::vector<std::string>& issues)
        : raw_(std::move(raw)), issues_(issues) {}

    bool has(const std::string& key) const { return raw_.entries.count(key) > 0; }

    std::string take_string(const std::string& key, const std::string& fallback) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return fallback;
        consumed_.push_back(key);
        return it->second.first;
    }

    double take_double(const std::string& key, double fallback) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return fallback;
        consumed_.push_back(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second.first, &used);
            if (used != it->second.first.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            issues_.push_back("key '" + key + "': expected a number, got '" +
                              it->second.first + "'");
            return fallback;
        }
    }

    long long take_int(const std::string& key, long long fallback) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return fallback;
        consumed_.push_back(key);
        try {
            std::size_t used = 0;
            const long long v = std::stoll(it->second.first, &used);
            if (used != it->second.first.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            issues_.push_back("key '" + key + "': expected an integer, got '" +
                              it->second.first + "'");
            return fallback;
        }
    }

    bool take_bool(const std::string& key, bool fallback) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return fallback;
        consumed_.push_back(key);
        const std::string& v = it->second.first;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        issues_.push_back("key '" + key + "': expected a boolean, got '" + v + "'");
        return fallback;
    }

    FieldExpr take_expr(const std::string& key, const std::string& fallback,
                        const std::string& allowed) {
        const std::string text = take_string(key, fallback);
        try {
            return FieldExpr::parse(text, allowed);
        } catch (const ExprError& e) {
            issues_.push_back("key '" + key + "': " + e.what());
            return FieldExpr::parse(fallback, allowed);
        }
    }

    std::vector<std::string> split(const std::string& text, char sep) {
        std::vector<std::string> parts;
        std::string item;
        std::istringstream in(text);
        while (std::getline(in, item, sep)) parts.push_back(trim(item));
        return parts;
    }

    void finish() {
        for (const auto& [key, value] : raw_.entries) {
            if (std::find(consumed_.begin(), consumed_.end(), key) != consumed_.end())
                continue;
            std::string msg = "line " + std::to_string(value.second) + ": unknown key '" +
                              key + "'";
            const std::string near = suggestion_for(key);
            if (!near.empty()) msg += " (did you mean '" + near + "'?)";
            issues_.push_back(msg);
        }
    }

  private:
    RawConfig raw_;
    std::vector<std::string>& issues_;
    std::vector<std::string> consumed_;
};

}  // namespace

const char* to_string(Mode m) {
    switch (m) {
        case Mode::verify_operators: return "verify_operators";
        case Mode::verify_calculus: return "verify_calculus";
        case Mode::simulate_manifold: return "simulate_manifold";
        case Mode::simulate_cartesian: return "simulate_cartesian";
    }
    return "unknown";
}

ConfigError::ConfigError(const std::string& origin, std::vector<std::string> issues)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration (" + origin + "):";
          for (const auto& issue : issues) msg += "\n  - " + issue;
          return msg;
      }()),
      issues_(std::move(issues)) {}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, {"cannot open file"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::vector<std::string> issues;
    Extractor ex(tokenize(text, issues), issues);
    ScenarioConfig cfg;

    const std::string mode = ex.take_string("mode", "");
    if (mode == "verify_operators")
        cfg.mode = Mode::verify_operators;
    else if (mode == "verify_calculus")
        cfg.mode = Mode::verify_calculus;
    else if (mode == "simulate_manifold")
        cfg.mode = Mode::simulate_manifold;
    else if (mode == "simulate_cartesian")
        cfg.mode = Mode::simulate_cartesian;
    else if (mode.empty())
        issues.push_back("missing required key 'mode'");
    else
        issues.push_back("key 'mode': unknown mode '" + mode +
                         "' (expected verify_operators, verify_calculus, simulate_manifold "
                         "or simulate_cartesian)");

    cfg.seed = static_cast<std::uint64_t>(ex.take_int("seed", 0));
    cfg.out_dir = ex.take_string("out", "out");

    cfg.nx = static_cast<int>(ex.take_int("grid.nx", cfg.nx));
    cfg.ny = static_cast<int>(ex.take_int("grid.ny", cfg.ny));
    cfg.nz = static_cast<int>(ex.take_int("grid.nz", cfg.nz));
    cfg.lx = ex.take_double("grid.lx", cfg.lx);
    cfg.ly = ex.take_double("grid.ly", cfg.ly);
    cfg.lz = ex.take_double("grid.lz", cfg.lz);
    const std::string axial = ex.take_string("grid.axial", "periodic");
    if (axial == "periodic")
        cfg.axial = dec::AxialTopology::periodic;
    else if (axial == "truncated")
        cfg.axial = dec::AxialTopology::truncated;
    else
        issues.push_back("key 'grid.axial': expected periodic or truncated, got '" + axial +
                         "'");

    cfg.degree = static_cast<int>(ex.take_int("scenario.degree", cfg.degree));
    cfg.mach = ex.take_double("scenario.mach", cfg.mach);
    cfg.transform = ex.take_bool("scenario.transform", false);
    if (ex.has("scenario.x0")) {
        const std::string text0 = ex.take_string("scenario.x0", "");
        const auto parts = ex.split(text0, ',');
        if (parts.size() != 3) {
            issues.push_back("key 'scenario.x0': expected three comma-separated expressions");
        } else {
            cfg.has_x0 = true;
            for (int i = 0; i < 3; ++i) {
                try {
                    cfg.x0[i] = FieldExpr::parse(parts[i], "xyz");
                } catch (const ExprError& e) {
                    issues.push_back(std::string("key 'scenario.x0': ") + e.what());
                }
            }
        }
    }
    cfg.alpha = ex.take_expr("scenario.alpha", "1", "xyz");
    cfg.m0_u = ex.take_expr("scenario.m0_u", "1", "xyz");
    cfg.m0_w = ex.take_expr("scenario.m0_w", "1", "xyz");
    cfg.m1_u = ex.take_expr("scenario.m1_u", "0", "xyz");
    cfg.m1_w = ex.take_expr("scenario.m1_w", "0", "xyz");
    cfg.dt = ex.take_double("scenario.dt", cfg.dt);
    cfg.t_final = ex.take_double("scenario.t_final", cfg.t_final);
    cfg.rho = ex.take_double("scenario.rho", cfg.rho);
    cfg.init = ex.take_string("scenario.init", cfg.init);
    if (ex.has("scenario.init_mode")) {
        const auto parts = ex.split(ex.take_string("scenario.init_mode", ""), ',');
        if (parts.size() != 3)
            issues.push_back("key 'scenario.init_mode': expected three integers");
        else
            for (int i = 0; i < 3; ++i) cfg.init_mode(i) = std::stoi(parts[i]);
    }
    if (ex.has("scenario.monitor_modes")) {
        const auto groups = ex.split(ex.take_string("scenario.monitor_modes", ""), ';');
        for (const auto& grp : groups) {
            if (grp.empty()) continue;
            const auto parts = ex.split(grp, ',');
            if (parts.size() != 3) {
                issues.push_back(
                    "key 'scenario.monitor_modes': expected `m1,m2,m3` groups separated by "
                    "';'");
                continue;
            }
            cfg.monitor_modes.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]),
                                           std::stoi(parts[2]));
        }
    }
    cfg.residual = ex.take_bool("scenario.residual", false);

    cfg.source_kind = ex.take_string("source.kind", "none");
    cfg.source_space = ex.take_expr("source.space", "0", "xyz");
    cfg.source_time = ex.take_expr("source.time", "1", "t");
    const std::string pos = ex.take_string("source.position", "auto");
    if (pos != "auto") {
        const auto parts = ex.split(pos, ',');
        if (parts.size() != 3)
            issues.push_back("key 'source.position': expected `x,y,z` or auto");
        else {
            cfg.source_pos_auto = false;
            for (int i = 0; i < 3; ++i) cfg.source_pos(i) = std::stod(parts[i]);
        }
    }
    cfg.source_amplitude = ex.take_double("source.amplitude", 1.0);

    cfg.snapshots_every = static_cast<int>(ex.take_int("output.snapshots_every", 0));

    cfg.cases = static_cast<int>(ex.take_int("verify.cases", cfg.cases));
    cfg.eta0 = ex.take_double("verify.eta0", cfg.eta0);

    ex.finish();

    // cross-field validation
    if (cfg.nx < 2 || cfg.ny < 2 || cfg.nz < 2)
        issues.push_back("keys 'grid.nx/ny/nz': cell counts must be at least 2");
    if (!(cfg.lx > 0) || !(cfg.ly > 0) || !(cfg.lz > 0))
        issues.push_back("keys 'grid.lx/ly/lz': lengths must be positive");
    if (!(cfg.dt > 0)) issues.push_back("key 'scenario.dt': must be positive");
    if (cfg.dt > cfg.t_final)
        issues.push_back("keys 'scenario.dt' and 'scenario.t_final': dt = " +
                         std::to_string(cfg.dt) + " exceeds t_final = " +
                         std::to_string(cfg.t_final));
    if (cfg.degree < 0 || cfg.degree > 2)
        issues.push_back("key 'scenario.degree': must be 0, 1 or 2");
    if (cfg.init != "zero" && cfg.init != "random" && cfg.init != "mode")
        issues.push_back("key 'scenario.init': expected zero, random or mode, got '" +
                         cfg.init + "'");
    if (cfg.source_kind != "none" && cfg.source_kind != "point" && cfg.source_kind != "field")
        issues.push_back("key 'source.kind': expected none, point or field, got '" +
                         cfg.source_kind + "'");
    if (cfg.cases < 1) issues.push_back("key 'verify.cases': must be at least 1");
    if (!(cfg.eta0 > 0)) issues.push_back("key 'verify.eta0': must be positive");

    if (!issues.empty()) throw ConfigError(origin, std::move(issues));
    return cfg;
}

}  // namespace driftwave::cfg
