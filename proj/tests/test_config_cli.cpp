#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "diodeopt/config.hpp"
#include "diodeopt/csv.hpp"
#include "diodeopt/errors.hpp"
#include "diodeopt/scenarios.hpp"

using namespace diodeopt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("diodeqopt_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DIODEQOPT_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kSolveConfig = R"json({
  "scenario": "solve",
  "design": {"V": 0.0},
  "grid": {"n_points": 801}
})json";

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing: defaults, errors, hashes") {
    SUBCASE("empty object gives the 4H-SiC defaults") {
        const RunConfig cfg = parse_config("{}");
        CHECK(cfg.material.kappa == doctest::Approx(9.66));
        CHECK(cfg.design.N_a == doctest::Approx(7e18));
        CHECK(cfg.spin.mu_z == doctest::Approx(9.573464e5));
        CHECK_FALSE(cfg.scenario.has_value());
    }
    SUBCASE("parse errors carry context") {
        CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
        CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
    }
    SUBCASE("field diagnostics name the offending path") {
        try {
            parse_config(R"({"grid": {"n_points": 5}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("grid") != std::string::npos);
        }
        try {
            parse_config(R"({"design": {"N_a": -1.0}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("design") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_config(R"({"sweep": {"axes": []}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"optimizer": {"active": ["bogus"]}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"scenario": "fly"})"), ConfigError);
    }
    SUBCASE("scenario mismatch is a config error") {
        const RunConfig cfg = parse_config(kSolveConfig);
        CHECK_THROWS_AS(validate_for_scenario(cfg, Scenario::linewidth), ConfigError);
        CHECK_NOTHROW(validate_for_scenario(cfg, Scenario::solve));
    }
    SUBCASE("fnv1a is stable") {
        CHECK(fnv1a_hex("") == "0xcbf29ce484222325");
        CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
    }
    SUBCASE("csv escaping") {
        CHECK(csv_escape("plain") == "plain");
        CHECK(csv_escape("a,b") == "\"a,b\"");
        CHECK(csv_escape("q\"q") == "\"q\"\"q\"");
    }
}

TEST_CASE("solve scenario writes boundary-exact profiles deterministically") {
    const fs::path dir1 = fresh_dir("solve1");
    const fs::path dir2 = fresh_dir("solve2");
    const RunConfig cfg = parse_config(kSolveConfig);
    RunOptions opt;
    opt.out_dir = dir1.string();
    run_scenario(cfg, Scenario::solve, opt);
    opt.out_dir = dir2.string();
    run_scenario(cfg, Scenario::solve, opt);

    const std::string csv = slurp(dir1 / "profile.csv");
    CHECK(csv == slurp(dir2 / "profile.csv"));  // byte-identical
    CHECK(csv.rfind("z_um,phi_V,E_V_per_cm,rho_c_C_per_cm3,n_cm3,p_cm3\n", 0) == 0);

    // First and last phi values are exactly 0 and phi_inf.
    std::istringstream lines(csv);
    std::string line, first, last;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        if (first.empty()) first = line;
        last = line;
    }
    auto second_field = [](const std::string& row) {
        const size_t a = row.find(',');
        const size_t b = row.find(',', a + 1);
        return std::stod(row.substr(a + 1, b - a - 1));
    };
    CHECK(second_field(first) == 0.0);
    const std::string summary = slurp(dir1 / "summary.json");
    CHECK(summary.find("phi_inf_V") != std::string::npos);
    const double phi_inf = std::stod(summary.substr(summary.find("phi_inf_V") + 11));
    CHECK(second_field(last) == doctest::Approx(phi_inf).epsilon(1e-12));

    const std::string prov = slurp(dir1 / "provenance.json");
    CHECK(prov.find("config_hash") != std::string::npos);
    CHECK(prov.find(fnv1a_hex(cfg.raw_text)) != std::string::npos);
}

TEST_CASE("linewidth and sweep scenarios emit their tables") {
    const fs::path dir = fresh_dir("lw");
    RunConfig cfg = parse_config(R"({"design": {"V": -20.0}, "linewidth_points": 64})");
    RunOptions opt;
    opt.out_dir = dir.string();
    run_scenario(cfg, Scenario::linewidth, opt);
    const std::string csv = slurp(dir / "linewidth.csv");
    CHECK(csv.rfind("z_def_um,gamma_MHz,", 0) == 0);
    int rows = -1;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 64);

    const fs::path dir_sweep = fresh_dir("sweep");
    cfg = parse_config(R"({
      "sweep": {"quantity": "depletion",
                "axes": [{"parameter": "N_n", "min": 1e15, "max": 1e16, "steps": 3, "scale": "log"},
                          {"parameter": "V", "min": -40.0, "max": -10.0, "steps": 2}]}
    })");
    opt.out_dir = dir_sweep.string();
    opt.threads = 2;
    run_scenario(cfg, Scenario::sweep, opt);
    const std::string sweep_csv = slurp(dir_sweep / "sweep.csv");
    CHECK(sweep_csv.rfind("N_n,V,dn_tilde_um,d_n_analytic_um,fully_depleted_n\n", 0) == 0);
    int sweep_rows = -1;
    for (char ch : sweep_csv)
        if (ch == '\n') ++sweep_rows;
    CHECK(sweep_rows == 6);
}

TEST_CASE("leakage scenario emits current, profile and surface linewidths") {
    const fs::path dir = fresh_dir("leak");
    const RunConfig cfg = parse_config(R"({
      "leakage": {"voltages": [-60.0], "x_def_min": 10.0, "x_def_max": 50.0, "x_def_steps": 3}
    })");
    RunOptions opt;
    opt.out_dir = dir.string();
    run_scenario(cfg, Scenario::leakage, opt);
    CHECK(slurp(dir / "jv.csv").rfind("V_V,J_tat_A_per_cm2,n_eff_cm3\n", 0) == 0);
    CHECK(slurp(dir / "trap_profile.csv").rfind("V_V,x_nm,n_V_cm3\n", 0) == 0);
    CHECK(slurp(dir / "gamma_surface.csv").rfind("V_V,x_def_nm,gamma_E_MHz,gamma_B_MHz\n", 0) == 0);
}

TEST_CASE("cli binary: exit codes and artifacts") {
    const fs::path dir = fresh_dir("cli");
    const fs::path cfg_path = dir / "config.json";
    write_file(cfg_path, kSolveConfig);

    CHECK(run_cli("solve --config " + cfg_path.string() + " --out " + (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "profile.csv"));
    CHECK(fs::exists(dir / "out" / "provenance.json"));

    // Wrong subcommand for the config's declared scenario.
    CHECK(run_cli("linewidth --config " + cfg_path.string() + " --out " +
                  (dir / "out2").string()) == 2);

    // Malformed config.
    write_file(dir / "bad.json", "{broken");
    CHECK(run_cli("solve --config " + (dir / "bad.json").string()) == 2);
    // Missing config file.
    CHECK(run_cli("solve --config " + (dir / "absent.json").string()) == 2);

    // A tiny optimize run end to end.
    write_file(dir / "opt.json", R"({
      "scenario": "optimize",
      "design": {"V": -5.0},
      "optimizer": {"active": ["V"], "max_iter": 4,
                     "bounds": {"include_breakdown": false}}
    })");
    CHECK(run_cli("optimize --config " + (dir / "opt.json").string() + " --out " +
                  (dir / "opt_out").string()) == 0);
    const std::string trace = slurp(dir / "opt_out" / "trace.csv");
    CHECK(trace.rfind("iteration,accepted,objective_MHz,merit,learning_rate,worst_violation,"
                      "z_opt_um,gradient_source,N_a,N_n,N_d,d_l,d,d_r,V\n",
                      0) == 0);
    const std::string summary = slurp(dir / "opt_out" / "summary.json");
    CHECK(summary.find("termination") != std::string::npos);
    CHECK(summary.find("final_gamma_MHz") != std::string::npos);
}

TEST_SUITE_END();
