#include "diodeopt/scenarios.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "diodeopt/csv.hpp"
#include "diodeopt/errors.hpp"
#include "diodeopt/leakage.hpp"
#include "diodeopt/version.hpp"

namespace diodeopt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string out_path(const RunOptions& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    return (fs::path(opt.out_dir) / name).string();
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

json depletion_json(const DepletionProfile& dep) {
    return json{{"d_p_um", dep.d_p},
                {"dn_tilde_um", dep.dn_tilde},
                {"d_n_plus_um", dep.d_n_plus},
                {"fully_depleted_n", dep.fully_depleted_n},
                {"d_n_analytic_um", dep.d_n_analytic},
                {"V_c_V", dep.V_c}};
}

void run_solve(const RunConfig& cfg, const RunOptions& opt, json& summary) {
    const PotentialSolution sol = solve_poisson(cfg.design, cfg.material, cfg.grid);
    const DepletionProfile dep = depletion_profile(sol, cfg.design, cfg.material);

    CsvWriter csv(out_path(opt, "profile.csv"),
                  {"z_um", "phi_V", "E_V_per_cm", "rho_c_C_per_cm3", "n_cm3", "p_cm3"});
    for (int i = 0; i < sol.z.size(); ++i)
        csv.write_numeric({sol.z[i], sol.phi[i], sol.E_field[i], sol.rho_c[i], sol.n_e[i], sol.p_h[i]});

    summary["mu_l_eV"] = sol.mu_l;
    summary["phi_inf_V"] = sol.phi_inf;
    summary["converged"] = sol.converged;
    summary["newton_residual"] = sol.residual;
    summary["max_abs_E_V_per_cm"] = sol.E_field.cwiseAbs().maxCoeff();
    summary["depletion"] = depletion_json(dep);
}

void run_linewidth(const RunConfig& cfg, const RunOptions& opt, json& summary) {
    const PotentialSolution sol = solve_poisson(cfg.design, cfg.material, cfg.grid);
    const DepletionProfile dep = depletion_profile(sol, cfg.design, cfg.material);

    CsvWriter csv(out_path(opt, "linewidth.csv"),
                  {"z_def_um", "gamma_MHz", "dE_total_V_per_cm", "dE_p_V_per_cm",
                   "dE_nplus_V_per_cm", "dE_n_depleted_V_per_cm", "dE_n_bulk_V_per_cm"});
    const int n = cfg.linewidth_points;
    for (int i = 1; i <= n; ++i) {
        const double z = cfg.design.d * i / (n + 1.0);
        const DeltaEResult r = delta_E_total(cfg.design, dep, z, cfg.material);
        csv.write_numeric({z, linewidth_majority(r.total, cfg.spin), r.total, r.components.p,
                           r.components.n_plus, r.components.n_depleted, r.components.n_bulk});
    }

    const DefectOptimum best = optimal_defect_position(cfg.design, dep, cfg.material, cfg.spin);
    const DeltaEResult at_def = delta_E_total(cfg.design, dep, cfg.spin.z_def, cfg.material);
    summary["gamma_at_z_def_MHz"] = linewidth_majority(at_def.total, cfg.spin);
    summary["z_def_um"] = cfg.spin.z_def;
    summary["z_opt_um"] = best.z_opt;
    summary["gamma_opt_MHz"] = best.gamma_opt;
    summary["depletion"] = depletion_json(dep);
}

void run_leakage(const RunConfig& cfg, const RunOptions& opt, json& summary) {
    CsvWriter jv(out_path(opt, "jv.csv"), {"V_V", "J_tat_A_per_cm2", "n_eff_cm3"});
    CsvWriter prof(out_path(opt, "trap_profile.csv"), {"V_V", "x_nm", "n_V_cm3"});
    CsvWriter gam(out_path(opt, "gamma_surface.csv"),
                  {"V_V", "x_def_nm", "gamma_E_MHz", "gamma_B_MHz"});

    json per_voltage = json::array();
    for (double V : cfg.leakage.voltages) {
        DiodeDesign d = cfg.design;
        d.V = V;
        SpinCenterParams spin = cfg.spin;
        const LeakageResult res = leakage_report(d, cfg.material, spin, cfg.grid);
        jv.write_numeric({V, res.J_tat, res.n_eff});
        // Thin the stored profile to every 16th node for the CSV.
        for (int i = 0; i < res.profile.x.size(); i += 16)
            prof.write_numeric({V, res.profile.x[i], res.profile.n_V[i]});

        SpinCenterParams resolved = spin;
        if (!resolved.tau_e) {
            const MobilityFit& f = cfg.material.mobility;
            const double total = d.N_a + d.N_n + d.N_d;
            const double mu0 =
                f.mu_min + (f.mu_max - f.mu_min) / (1.0 + std::pow(total / f.N_ref, f.alpha_fit));
            resolved.tau_e = mu0 * 1e-4 * cfg.material.m_star * constants::m_e0 / constants::q_e;
        }
        for (int i = 0; i < cfg.leakage.x_def_steps; ++i) {
            const double w = cfg.leakage.x_def_steps == 1
                                 ? 0.0
                                 : static_cast<double>(i) / (cfg.leakage.x_def_steps - 1);
            const double x = cfg.leakage.x_def_min +
                             (cfg.leakage.x_def_max - cfg.leakage.x_def_min) * w;
            if (!(x > cfg.material.trap.D_depth)) continue;
            gam.write_numeric({V, x,
                               surface_electric_linewidth(res.profile, x, resolved, cfg.material),
                               surface_magnetic_linewidth(res.profile, x, resolved, cfg.material, d.T)});
        }
        per_voltage.push_back(json{{"V_V", V},
                                   {"J_tat_A_per_cm2", res.J_tat},
                                   {"n_eff_cm3", res.n_eff},
                                   {"gamma_E_at_x_def_MHz", res.gamma_E_surface},
                                   {"gamma_B_at_x_def_MHz", res.gamma_B_surface}});
    }
    summary["x_def_nm"] = cfg.spin.x_def;
    summary["per_voltage"] = per_voltage;
}

void run_sweep(const RunConfig& cfg, const RunOptions& opt, json& summary) {
    const bool want_gamma = cfg.sweep.quantity == "linewidth";
    std::vector<std::string> header;
    for (const auto& ax : cfg.sweep.axes) header.push_back(ax.parameter);
    header.insert(header.end(), {"dn_tilde_um", "d_n_analytic_um", "fully_depleted_n"});
    if (want_gamma) {
        header.push_back("gamma_opt_MHz");
        header.push_back("z_opt_um");
    }
    CsvWriter csv(out_path(opt, "sweep.csv"), header);

    auto apply = [](DiodeDesign d, const std::string& name, double v) {
        if (name == "N_a") d.N_a = v;
        else if (name == "N_n") d.N_n = v;
        else if (name == "N_d") d.N_d = v;
        else if (name == "d_l") d.d_l = v;
        else if (name == "d") d.d = v;
        else if (name == "d_r") d.d_r = v;
        else d.V = v;
        return d;
    };

    std::vector<std::vector<double>> grids;
    for (const auto& ax : cfg.sweep.axes) grids.push_back(ax.values());
    const bool two = grids.size() == 2;
    const size_t n_outer = grids[0].size();
    const size_t n_inner = two ? grids[1].size() : 1;

    // Row-major over the axis grid; evaluation order is fixed for determinism.
    struct Row {
        std::vector<double> cells;
    };
    std::vector<Row> rows(n_outer * n_inner);
    std::vector<int> indices(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) indices[i] = static_cast<int>(i);
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&](int flat) {
        try {
            const size_t i = flat / n_inner, k = flat % n_inner;
            DiodeDesign d = apply(cfg.design, cfg.sweep.axes[0].parameter, grids[0][i]);
            if (two) d = apply(d, cfg.sweep.axes[1].parameter, grids[1][k]);
            const PotentialSolution sol = solve_poisson(d, cfg.material, cfg.grid);
            const DepletionProfile dep = depletion_profile(sol, d, cfg.material);
            Row row;
            row.cells.push_back(grids[0][i]);
            if (two) row.cells.push_back(grids[1][k]);
            row.cells.insert(row.cells.end(), {dep.dn_tilde, dep.d_n_analytic,
                                               dep.fully_depleted_n ? 1.0 : 0.0});
            if (want_gamma) {
                const DefectOptimum best = optimal_defect_position(d, dep, cfg.material, cfg.spin);
                row.cells.push_back(best.gamma_opt);
                row.cells.push_back(best.z_opt);
            }
            rows[flat] = std::move(row);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    const int threads = std::max(1, opt.threads);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < std::min<int>(threads, static_cast<int>(rows.size())); ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < static_cast<int>(rows.size());
                 i = next.fetch_add(1))
                work(i);
        });
    for (auto& th : pool) th.join();
    if (pool.empty())
        for (size_t i = 0; i < rows.size(); ++i) work(static_cast<int>(i));
    if (first_error) std::rethrow_exception(first_error);

    for (const auto& row : rows) csv.write_numeric(row.cells);
    summary["rows"] = rows.size();
}

void run_optimize(const RunConfig& cfg, const RunOptions& opt, json& summary) {
    // Canonical parameter vector: all seven design parameters, mask from config.
    const std::vector<std::string> names{"N_a", "N_n", "N_d", "d_l", "d", "d_r", "V"};
    ParameterVector p0;
    p0.names = names;
    p0.values.resize(7);
    p0.values << cfg.design.N_a, cfg.design.N_n, cfg.design.N_d, cfg.design.d_l, cfg.design.d,
        cfg.design.d_r, cfg.design.V;
    p0.active.assign(7, 0);
    for (const auto& a : cfg.optimize.active)
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == a) p0.active[i] = 1;

    OptimizerConfig oc = cfg.optimize.optimizer;
    oc.threads = std::max(1, opt.threads);
    if (oc.D_scales.size() == 0) {
        oc.D_scales.resize(7);
        const double floors[7] = {1e14, 1e14, 1e14, 0.1, 0.1, 0.1, 1.0};
        for (int i = 0; i < 7; ++i) oc.D_scales[i] = std::max(std::abs(p0.values[i]), floors[i]);
    }

    auto problem = std::make_shared<const DiodeProblem>(cfg.design, cfg.material, cfg.spin,
                                                        cfg.grid, names);
    const ConstraintSet constraints =
        diode_constraints(cfg.optimize.bounds, cfg.material, problem, p0);

    auto write_trace = [&](const OptimizationTrace& trace) {
        std::vector<std::string> header{"iteration", "accepted",       "objective_MHz",
                                        "merit",     "learning_rate",  "worst_violation",
                                        "z_opt_um",  "gradient_source"};
        for (const auto& n : names) header.push_back(n);
        CsvWriter csv(out_path(opt, "trace.csv"), header);
        for (const auto& r : trace.records) {
            std::vector<std::string> cells{std::to_string(r.iteration),
                                           r.accepted ? "1" : "0",
                                           format_double(r.objective),
                                           format_double(r.merit),
                                           format_double(r.learning_rate),
                                           format_double(r.worst_violation),
                                           format_double(r.z_opt),
                                           r.gradient_source};
            for (int i = 0; i < r.p.size(); ++i) cells.push_back(format_double(r.p[i]));
            csv.write_row(cells);
        }
    };

    OptimizationTrace trace;
    try {
        trace = optimize(diode_objective(problem), p0, constraints, oc);
    } catch (const OptimizeError& e) {
        write_trace(e.trace);  // trace up to the failure
        throw;
    }
    write_trace(trace);

    json initial, final_params;
    for (int i = 0; i < 7; ++i) {
        initial[names[i]] = p0.values[i];
        final_params[names[i]] = trace.p_final[i];
    }
    summary["initial_parameters"] = initial;
    summary["final_parameters"] = final_params;
    summary["initial_gamma_MHz"] = trace.f_initial;
    summary["final_gamma_MHz"] = trace.f_final;
    summary["final_z_opt_um"] = trace.z_opt_final;
    summary["iterations"] = trace.records.size();
    summary["accepted"] = trace.accepted_count;
    summary["termination"] = OptimizationTrace::reason_name(trace.reason);
    summary["merit_M_final"] = trace.merit_M_final;
}

}  // namespace

void run_scenario(const RunConfig& config, Scenario scenario, const RunOptions& options) {
    validate_for_scenario(config, scenario);
    const auto t0 = std::chrono::steady_clock::now();

    json summary;
    summary["scenario"] = scenario_name(scenario);
    switch (scenario) {
        case Scenario::solve: run_solve(config, options, summary); break;
        case Scenario::linewidth: run_linewidth(config, options, summary); break;
        case Scenario::leakage: run_leakage(config, options, summary); break;
        case Scenario::sweep: run_sweep(config, options, summary); break;
        case Scenario::optimize: run_optimize(config, options, summary); break;
    }
    write_json(out_path(options, "summary.json"), summary);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json prov{{"config_hash", fnv1a_hex(config.raw_text)},
              {"hash_algorithm", "fnv1a64"},
              {"version", kVersion},
              {"scenario", scenario_name(scenario)},
              {"wall_time_s", wall},
              {"seed", options.seed},
              {"threads", options.threads}};
    write_json(out_path(options, "provenance.json"), prov);
}

}  // namespace diodeopt
