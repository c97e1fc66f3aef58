#pragma once

#include <cstdint>
#include <string>

#include "diodeopt/config.hpp"

namespace diodeopt {

struct RunOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 0;  // recorded only; the pipeline is deterministic
    int threads = 1;
};

// Executes the scenario and writes its CSV artifacts plus summary.json and
// provenance.json into out_dir. Throws ConfigError / SolveError /
// OptimizeError / InfeasibleError; the CLI maps those onto exit codes.
void run_scenario(const RunConfig& config, Scenario scenario, const RunOptions& options);

}  // namespace diodeopt
