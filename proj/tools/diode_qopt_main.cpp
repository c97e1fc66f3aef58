#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "diodeopt/errors.hpp"
#include "diodeopt/scenarios.hpp"
#include "diodeopt/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "path to the JSON run configuration")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory (default: current)");
    sub->add_option("--seed", args.seed, "RNG seed, recorded in provenance (pipeline is deterministic)");
    sub->add_option("--threads", args.threads, "concurrent Poisson solves for sweeps and gradients")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diode-qopt: spin-center linewidth simulation and design optimization"};
    app.set_version_flag("--version", diodeopt::kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    const char* names[] = {"solve", "linewidth", "leakage", "sweep", "optimize"};
    const char* blurbs[] = {"electrostatic profiles to CSV",
                            "linewidth vs defect position to CSV",
                            "leakage current and surface-noise linewidths to CSV",
                            "depletion/linewidth over a parameter grid to CSV",
                            "constrained scaled-gradient-descent run with full trace"};
    for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], blurbs[i]), args);

    CLI11_PARSE(app, argc, argv);

    const std::string chosen = app.get_subcommands().front()->get_name();
    const auto scenario = diodeopt::scenario_from_name(chosen);

    try {
        const diodeopt::RunConfig config = diodeopt::load_config(args.config_path);
        diodeopt::RunOptions options;
        options.out_dir = args.out_dir;
        options.seed = args.seed;
        options.threads = args.threads;
        diodeopt::run_scenario(config, *scenario, options);
        return 0;
    } catch (const diodeopt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const diodeopt::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const diodeopt::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 4;
    } catch (const diodeopt::OptimizeError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const diodeopt::SolveError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
