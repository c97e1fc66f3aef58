#include "diodeopt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diodeopt/errors.hpp"

namespace diodeopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

double get_number(const json& j, const std::string& path, const std::string& key, double fallback,
                  bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    const json& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

const json* get_object(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) return nullptr;
    const json& v = j.at(key);
    if (!v.is_object()) fail(path + "." + key, "expected an object");
    return &v;
}

bool is_design_parameter(const std::string& name) {
    return name == "N_a" || name == "N_n" || name == "N_d" || name == "d_l" || name == "d" ||
           name == "d_r" || name == "V";
}

void parse_material(const json& j, MaterialParams& m) {
    const std::string p = "material";
    m.kappa = get_number(j, p, "kappa", m.kappa);
    bool has_Eg = false, has_ec = false, has_ev = false;
    m.E_g = get_number(j, p, "E_g", m.E_g, &has_Eg);
    m.eps_c = get_number(j, p, "eps_c", m.eps_c, &has_ec);
    m.eps_v = get_number(j, p, "eps_v", m.eps_v, &has_ev);
    if (has_Eg && !has_ec && !has_ev) m.eps_c = m.eps_v + m.E_g;  // gap given, keep eps_v
    if (!has_Eg) m.E_g = m.eps_c - m.eps_v;
    m.eps_a = get_number(j, p, "eps_a", m.eps_a);
    m.eps_d = get_number(j, p, "eps_d", m.eps_d);
    m.m_c = get_number(j, p, "m_c", m.m_c);
    m.m_v = get_number(j, p, "m_v", m.m_v);
    m.m_star = get_number(j, p, "m_star", m.m_star);
    m.E_BD = get_number(j, p, "E_BD", m.E_BD);
    m.lattice_const = get_number(j, p, "lattice_const", m.lattice_const);
    m.eps0_F_per_m = get_number(j, p, "eps0", m.eps0_F_per_m);
    if (const json* mob = get_object(j, p, "mobility")) {
        const std::string mp = p + ".mobility";
        m.mobility.mu_min = get_number(*mob, mp, "mu_min", m.mobility.mu_min);
        m.mobility.mu_max = get_number(*mob, mp, "mu_max", m.mobility.mu_max);
        m.mobility.N_ref = get_number(*mob, mp, "N_ref", m.mobility.N_ref);
        m.mobility.alpha_fit = get_number(*mob, mp, "alpha_fit", m.mobility.alpha_fit);
        m.mobility.v_sat = get_number(*mob, mp, "v_sat", m.mobility.v_sat);
        m.mobility.beta_fit = get_number(*mob, mp, "beta_fit", m.mobility.beta_fit);
    }
    if (const json* trap = get_object(j, p, "trap")) {
        const std::string tp = p + ".trap";
        m.trap.N_t = get_number(*trap, tp, "N_t", m.trap.N_t);
        m.trap.sigma_n = get_number(*trap, tp, "sigma_n", m.trap.sigma_n);
        m.trap.sigma_p = get_number(*trap, tp, "sigma_p", m.trap.sigma_p);
        m.trap.eps_t0 = get_number(*trap, tp, "eps_t0", m.trap.eps_t0);
        m.trap.D_depth = get_number(*trap, tp, "D_depth", m.trap.D_depth);
        m.trap.fwhm = get_number(*trap, tp, "fwhm", m.trap.fwhm);
    }
    try {
        m.validate();
    } catch (const DomainError& e) {
        fail(p, e.what());
    }
}

void parse_design(const json& j, DiodeDesign& d) {
    const std::string p = "design";
    d.N_a = get_number(j, p, "N_a", d.N_a);
    d.N_n = get_number(j, p, "N_n", d.N_n);
    d.N_d = get_number(j, p, "N_d", d.N_d);
    d.d_l = get_number(j, p, "d_l", d.d_l);
    d.d = get_number(j, p, "d", d.d);
    d.d_r = get_number(j, p, "d_r", d.d_r);
    d.V = get_number(j, p, "V", d.V);
    d.T = get_number(j, p, "T", d.T);
    try {
        d.validate();
    } catch (const DomainError& e) {
        fail(p, e.what());
    }
}

void parse_spin(const json& j, SpinCenterParams& s) {
    const std::string p = "spin";
    s.mu_z = get_number(j, p, "mu_z", s.mu_z);
    s.g_eff = get_number(j, p, "g_eff", s.g_eff);
    s.z_def = get_number(j, p, "z_def", s.z_def);
    s.x_def = get_number(j, p, "x_def", s.x_def);
    s.theta = get_number(j, p, "theta", s.theta);
    s.dipole_var = get_number(j, p, "dipole_var", s.dipole_var);
    bool has_tau = false;
    const double tau = get_number(j, p, "tau_e", 0.0, &has_tau);
    if (has_tau) s.tau_e = tau;
    try {
        s.validate();
    } catch (const DomainError& e) {
        fail(p, e.what());
    }
}

void parse_grid(const json& j, GridConfig& g) {
    const std::string p = "grid";
    g.n_points = get_int(j, p, "n_points", g.n_points);
    g.newton_tol = get_number(j, p, "newton_tol", g.newton_tol);
    g.newton_max_iter = get_int(j, p, "newton_max_iter", g.newton_max_iter);
    g.damping = get_number(j, p, "damping", g.damping);
    try {
        g.validate();
    } catch (const DomainError& e) {
        fail(p, e.what());
    }
}

void parse_optimize(const json& j, OptimizeSpec& o) {
    const std::string p = "optimizer";
    OptimizerConfig& c = o.optimizer;
    c.s_min = get_number(j, p, "s_min", c.s_min);
    c.s_max = get_number(j, p, "s_max", c.s_max);
    c.merit_M = get_number(j, p, "merit_M", c.merit_M);
    c.merit_alpha = get_number(j, p, "merit_alpha", c.merit_alpha);
    c.gamma_proj = get_number(j, p, "gamma_proj", c.gamma_proj);
    c.n_max_proj = get_int(j, p, "n_max_proj", c.n_max_proj);
    c.chi = get_number(j, p, "chi", c.chi);
    c.n_conv = get_int(j, p, "n_conv", c.n_conv);
    c.k_window = get_int(j, p, "k_window", c.k_window);
    c.l_avg = get_int(j, p, "l_avg", c.l_avg);
    c.fd_rel = get_number(j, p, "fd_rel", c.fd_rel);
    c.rate_up = get_number(j, p, "rate_up", c.rate_up);
    c.rate_down = get_number(j, p, "rate_down", c.rate_down);
    c.max_iter = get_int(j, p, "max_iter", c.max_iter);
    if (j.contains("active")) {
        const json& a = j.at("active");
        if (!a.is_array() || a.empty()) fail(p + ".active", "expected a non-empty array");
        o.active.clear();
        for (size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_string()) fail(p + ".active", "expected strings");
            const std::string name = a[i].get<std::string>();
            if (!is_design_parameter(name))
                fail(p + ".active", "unknown design parameter '" + name + "'");
            o.active.push_back(name);
        }
    }
    if (const json* b = get_object(j, p, "bounds")) {
        const std::string bp = p + ".bounds";
        o.bounds.N_n_min = get_number(*b, bp, "N_n_min", o.bounds.N_n_min);
        o.bounds.N_ad_min = get_number(*b, bp, "N_ad_min", o.bounds.N_ad_min);
        o.bounds.N_cap = get_number(*b, bp, "N_cap", o.bounds.N_cap);
        o.bounds.length_min = get_number(*b, bp, "length_min", o.bounds.length_min);
        o.bounds.omega_bd = get_number(*b, bp, "omega_bd", o.bounds.omega_bd);
        o.bounds.include_breakdown = get_bool(*b, bp, "include_breakdown", o.bounds.include_breakdown);
    }
    try {
        c.validate();
    } catch (const DomainError& e) {
        fail(p, e.what());
    }
}

void parse_sweep(const json& j, SweepSpec& s) {
    const std::string p = "sweep";
    s.quantity = get_string(j, p, "quantity", s.quantity);
    if (s.quantity != "depletion" && s.quantity != "linewidth")
        fail(p + ".quantity", "expected 'depletion' or 'linewidth'");
    if (!j.contains("axes")) fail(p, "missing 'axes'");
    const json& axes = j.at("axes");
    if (!axes.is_array() || axes.empty() || axes.size() > 2)
        fail(p + ".axes", "expected an array of one or two axes");
    s.axes.clear();
    for (size_t i = 0; i < axes.size(); ++i) {
        const std::string ap = p + ".axes[" + std::to_string(i) + "]";
        const json& a = axes[i];
        if (!a.is_object()) fail(ap, "expected an object");
        SweepAxis axis;
        axis.parameter = get_string(a, ap, "parameter", "");
        if (!is_design_parameter(axis.parameter))
            fail(ap + ".parameter", "unknown design parameter '" + axis.parameter + "'");
        bool has_min = false, has_max = false;
        axis.min = get_number(a, ap, "min", 0.0, &has_min);
        axis.max = get_number(a, ap, "max", 0.0, &has_max);
        if (!has_min || !has_max) fail(ap, "missing 'min' or 'max'");
        axis.steps = get_int(a, ap, "steps", 2);
        if (axis.steps < 1) fail(ap + ".steps", "must be >= 1");
        const std::string scale = get_string(a, ap, "scale", "linear");
        if (scale != "linear" && scale != "log") fail(ap + ".scale", "expected 'linear' or 'log'");
        axis.log_scale = scale == "log";
        if (axis.log_scale && (!(axis.min > 0.0) || !(axis.max > 0.0)))
            fail(ap, "log scale requires positive bounds");
        s.axes.push_back(axis);
    }
}

void parse_leakage(const json& j, LeakageSpec& l) {
    const std::string p = "leakage";
    if (j.contains("voltages")) {
        const json& v = j.at("voltages");
        if (!v.is_array() || v.empty()) fail(p + ".voltages", "expected a non-empty array");
        l.voltages.clear();
        for (const auto& e : v) {
            if (!e.is_number()) fail(p + ".voltages", "expected numbers");
            l.voltages.push_back(e.get<double>());
        }
    }
    l.x_def_min = get_number(j, p, "x_def_min", l.x_def_min);
    l.x_def_max = get_number(j, p, "x_def_max", l.x_def_max);
    l.x_def_steps = get_int(j, p, "x_def_steps", l.x_def_steps);
    if (!(l.x_def_min > 0.0) || !(l.x_def_max > l.x_def_min))
        fail(p, "need 0 < x_def_min < x_def_max");
    if (l.x_def_steps < 1) fail(p + ".x_def_steps", "must be >= 1");
}

}  // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::solve: return "solve";
        case Scenario::linewidth: return "linewidth";
        case Scenario::leakage: return "leakage";
        case Scenario::sweep: return "sweep";
        case Scenario::optimize: return "optimize";
    }
    return "unknown";
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
    if (name == "solve") return Scenario::solve;
    if (name == "linewidth") return Scenario::linewidth;
    if (name == "leakage") return Scenario::leakage;
    if (name == "sweep") return Scenario::sweep;
    if (name == "optimize") return Scenario::optimize;
    return std::nullopt;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> out;
    out.reserve(steps);
    if (steps == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < steps; ++i) {
        const double w = static_cast<double>(i) / (steps - 1);
        if (log_scale)
            out.push_back(min * std::pow(max / min, w));
        else
            out.push_back(min + (max - min) * w);
    }
    return out;
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg;
    cfg.raw_text = json_text;
    const std::string sname = get_string(j, "", "scenario", "");
    if (!sname.empty()) {
        auto s = scenario_from_name(sname);
        if (!s) fail("scenario", "unknown scenario '" + sname + "'");
        cfg.scenario = s;
    }
    if (const json* m = get_object(j, "", "material")) parse_material(*m, cfg.material);
    if (const json* d = get_object(j, "", "design")) parse_design(*d, cfg.design);
    if (const json* s = get_object(j, "", "spin")) parse_spin(*s, cfg.spin);
    if (const json* g = get_object(j, "", "grid")) parse_grid(*g, cfg.grid);
    if (const json* o = get_object(j, "", "optimizer")) parse_optimize(*o, cfg.optimize);
    if (const json* s = get_object(j, "", "sweep")) parse_sweep(*s, cfg.sweep);
    if (const json* l = get_object(j, "", "leakage")) parse_leakage(*l, cfg.leakage);
    cfg.linewidth_points = get_int(j, "", "linewidth_points", cfg.linewidth_points);
    if (cfg.linewidth_points < 2) fail("linewidth_points", "must be >= 2");

    // Defaults still need to satisfy the cross-field invariants.
    try {
        cfg.material.validate();
        cfg.design.validate();
        cfg.spin.validate();
        cfg.grid.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_for_scenario(const RunConfig& config, Scenario scenario) {
    if (config.scenario && *config.scenario != scenario)
        throw ConfigError(std::string("config names scenario '") +
                          scenario_name(*config.scenario) + "' but '" + scenario_name(scenario) +
                          "' was requested");
    if (scenario == Scenario::sweep && config.sweep.axes.empty())
        throw ConfigError("sweep: missing 'sweep.axes' block");
    if (scenario == Scenario::optimize && config.optimize.active.empty())
        throw ConfigError("optimize: 'optimizer.active' must name at least one parameter");
    if (scenario == Scenario::linewidth && !(config.spin.z_def > 0.0 && config.spin.z_def < config.design.d))
        throw ConfigError("linewidth: spin.z_def must lie inside (0, design.d)");
    if (scenario == Scenario::leakage && !(config.spin.x_def > config.material.trap.D_depth))
        throw ConfigError("leakage: spin.x_def must exceed material.trap.D_depth");
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace diodeopt
