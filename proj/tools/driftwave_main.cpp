#include "driftwave/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr const char* kVersion = "driftwave 0.1.0";

struct CommonArgs {
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed_override, "override the configured seed");
    cmd->add_option("--out", args.out_override, "override the output directory");
}

int execute(const CommonArgs& args, bool want_verify) {
    driftwave::cfg::ScenarioConfig config;
    try {
        config = driftwave::cfg::parse_config(args.config_path);
    } catch (const driftwave::cfg::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return driftwave::kExitUsage;
    }
    if (args.seed_override >= 0) config.seed = static_cast<std::uint64_t>(args.seed_override);
    if (!args.out_override.empty()) config.out_dir = args.out_override;

    const bool is_verify = config.mode == driftwave::cfg::Mode::verify_operators ||
                           config.mode == driftwave::cfg::Mode::verify_calculus;
    if (is_verify != want_verify) {
        std::cerr << "config mode '" << driftwave::cfg::to_string(config.mode)
                  << "' does not match the '" << (want_verify ? "verify" : "simulate")
                  << "' subcommand\n";
        return driftwave::kExitUsage;
    }
    return driftwave::run_scenario(config, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structure-preserving wave solver with drift"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    CommonArgs verify_args, simulate_args;
    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    add_common(verify, verify_args);
    CLI::App* simulate = app.add_subcommand("simulate", "run a simulation scenario");
    add_common(simulate, simulate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? driftwave::kExitOk : driftwave::kExitUsage;
    }

    if (verify->parsed()) return execute(verify_args, true);
    if (simulate->parsed()) return execute(simulate_args, false);
    std::cout << app.help();
    return driftwave::kExitOk;
}
