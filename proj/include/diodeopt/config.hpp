#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diodeopt/optimizer.hpp"

namespace diodeopt {

enum class Scenario { solve, linewidth, leakage, sweep, optimize };

const char* scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(const std::string& name);

struct SweepAxis {
    std::string parameter;  // one of N_a,N_n,N_d,d_l,d,d_r,V
    double min = 0.0;
    double max = 0.0;
    int steps = 2;
    bool log_scale = false;

    std::vector<double> values() const;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;      // one or two
    std::string quantity = "depletion";  // "depletion" or "linewidth"
};

struct LeakageSpec {
    std::vector<double> voltages{-1100.0};
    double x_def_min = 6.0;    // [nm]
    double x_def_max = 200.0;  // [nm]
    int x_def_steps = 40;
};

struct OptimizeSpec {
    OptimizerConfig optimizer{};
    DesignBounds bounds{};
    std::vector<std::string> active{"V"};  // parameters the optimizer may move
};

struct RunConfig {
    std::optional<Scenario> scenario;  // optional; CLI subcommand rules
    MaterialParams material{};
    DiodeDesign design{};
    SpinCenterParams spin{};
    GridConfig grid{};
    OptimizeSpec optimize{};
    SweepSpec sweep{};
    LeakageSpec leakage{};
    int linewidth_points = 512;  // z samples for the linewidth scenario CSV

    std::string raw_text;  // exact bytes read, hashed for provenance
};

// Parse + validate; throws ConfigError with a field-path diagnostic.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

// Post-parse validation for a chosen scenario (block presence, ranges).
void validate_for_scenario(const RunConfig& config, Scenario scenario);

// FNV-1a 64-bit over the raw config bytes, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace diodeopt
