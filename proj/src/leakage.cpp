#include "diodeopt/leakage.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "diodeopt/errors.hpp"

namespace diodeopt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Composite Simpson over a uniform grid with an even interval count.
double simpson_uniform(const Eigen::VectorXd& y, double h) {
    const int n = static_cast<int>(y.size());
    double s = y[0] + y[n - 1];
    for (int i = 1; i + 1 < n; ++i) s += y[i] * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

struct RateContext {
    double kT;           // [J]
    double delta;        // band gap [J]
    double K_over_E;     // K * |E| [V/m], i.e. K = K_over_E / |E|
    double beta_pf;      // [J / sqrt(V/m)]
    double log_cnNc;     // ln of c_n N_c [ln 1/s]
    double log_cpNv;
    double eps_c_J, eps_v_J, eps_t0_J;

    RateContext(double T, const MaterialParams& m) {
        namespace c = constants;
        kT = c::k_B * T;
        delta = m.E_g * c::eV_to_J;
        const double m_star = m.m_star * c::m_e0;
        K_over_E = (4.0 / 3.0) * std::sqrt(2.0 * m_star) * delta * std::sqrt(delta) /
                   (c::q_e * c::hbar);
        beta_pf = std::sqrt(c::q_e * c::q_e * c::q_e / (kPi * m.permittivity()));
        const double v_th = std::sqrt(3.0 * kT / m_star) * c::m_per_s_to_cm_per_s;  // cm/s
        const double Nc = effective_dos(T, m.m_c);  // cm^-3
        const double Nv = effective_dos(T, m.m_v);
        log_cnNc = std::log(v_th * m.trap.sigma_n * Nc);
        log_cpNv = std::log(v_th * m.trap.sigma_p * Nv);
        eps_c_J = m.eps_c * c::eV_to_J;
        eps_v_J = m.eps_v * c::eV_to_J;
        eps_t0_J = m.trap.eps_t0 * c::eV_to_J;
    }
};

// ln Gamma for the Hurkx integral (Delta/kT) * int_0^1 exp(g(u)) du with
// g(u) = (Delta/kT) u - K u^{3/2}. Max-subtracted adaptive quadrature.
double log_hurkx(const RateContext& ctx, double E_V_per_m) {
    if (E_V_per_m == 0.0) return -std::numeric_limits<double>::infinity();
    const double dk = ctx.delta / ctx.kT;
    const double K = ctx.K_over_E / std::abs(E_V_per_m);
    auto g = [&](double u) { return dk * u - K * u * std::sqrt(u); };
    // Interior stationary point of g, clamped into [0, 1].
    double u_star = (2.0 * dk / (3.0 * K));
    u_star *= u_star;
    u_star = std::min(u_star, 1.0);
    const double g_max = std::max({g(0.0), g(u_star), g(1.0)});
    auto integrand = [&](double u) { return std::exp(g(u) - g_max); };
    const double I = integrate_adaptive(integrand, 0.0, 1.0, 1e-12);
    if (!(I > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(dk) + g_max + std::log(I);
}

// ln(1 + Gamma) without forming Gamma.
double log1p_hurkx(const RateContext& ctx, double E_V_per_m) {
    const double lg = log_hurkx(ctx, E_V_per_m);
    if (lg == -std::numeric_limits<double>::infinity()) return 0.0;
    if (lg > 36.0) return lg;  // 1 is negligible
    return std::log1p(std::exp(lg));
}

EmissionRates emission_rates_impl(const RateContext& ctx, double E_V_per_cm) {
    const double E = std::abs(E_V_per_cm) * constants::V_per_cm_to_V_per_m;
    EmissionRates out;
    double eps_t = ctx.eps_t0_J - ctx.beta_pf * std::sqrt(E);
    if (eps_t <= ctx.eps_v_J) {
        eps_t = ctx.eps_v_J;
        out.clamped = true;
    } else if (eps_t >= ctx.eps_c_J) {
        eps_t = ctx.eps_c_J;
        out.clamped = true;
    }
    const double lgam = log1p_hurkx(ctx, E);
    out.e_n = std::exp(ctx.log_cnNc - (ctx.eps_c_J - eps_t) / ctx.kT + lgam);
    out.e_p = std::exp(ctx.log_cpNv - (eps_t - ctx.eps_v_J) / ctx.kT + lgam);
    return out;
}

double generation_from_rates(const EmissionRates& r, double N_t) {
    const double sum = r.e_n + r.e_p;
    if (!(sum > 0.0)) return 0.0;
    return N_t * (r.e_n / sum) * r.e_p;
}

// Depletion span [z_lo, z_hi] in um; empty when nothing is depleted.
struct Span {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
};

Span depletion_span(const DiodeDesign& design, const DepletionProfile& dep) {
    return Span{-dep.d_p, dep.dn_tilde + dep.d_n_plus};
}

}  // namespace

double field_enhancement_factor(double E_V_per_cm, double T, const MaterialParams& material) {
    if (!(T > 0.0)) throw DomainError("field_enhancement_factor: temperature must be > 0");
    if (E_V_per_cm == 0.0) return 0.0;
    RateContext ctx(T, material);
    return std::exp(log_hurkx(ctx, std::abs(E_V_per_cm) * constants::V_per_cm_to_V_per_m));
}

double log_field_enhancement(double E_V_per_cm, double T, const MaterialParams& material) {
    if (!(T > 0.0)) throw DomainError("log_field_enhancement: temperature must be > 0");
    RateContext ctx(T, material);
    return log_hurkx(ctx, std::abs(E_V_per_cm) * constants::V_per_cm_to_V_per_m);
}

EmissionRates emission_rates(double E_V_per_cm, double T, const MaterialParams& material) {
    if (!(T > 0.0)) throw DomainError("emission_rates: temperature must be > 0");
    RateContext ctx(T, material);
    return emission_rates_impl(ctx, E_V_per_cm);
}

double trap_occupation(double e_n, double e_p, double N_t, double n_t0, double t) {
    if (!(e_n >= 0.0) || !(e_p >= 0.0) || !(e_n + e_p > 0.0))
        throw DomainError("trap_occupation: rates must be >= 0 with e_n + e_p > 0");
    if (!(n_t0 >= 0.0) || !(n_t0 <= N_t))
        throw DomainError("trap_occupation: n_t0 must lie in [0, N_t]");
    const double ss = trap_occupation_steady(e_n, e_p, N_t);
    return ss + (n_t0 - ss) * std::exp(-(e_n + e_p) * t);
}

double trap_occupation_steady(double e_n, double e_p, double N_t) {
    if (!(e_n >= 0.0) || !(e_p >= 0.0) || !(e_n + e_p > 0.0))
        throw DomainError("trap_occupation_steady: rates must be >= 0 with e_n + e_p > 0");
    return N_t * e_p / (e_n + e_p);
}

double generation_rate(double z_um, const PotentialSolution& solution,
                       const MaterialParams& material, double T) {
    RateContext ctx(T, material);
    const EmissionRates r = emission_rates_impl(ctx, solution.field_at(z_um));
    return generation_from_rates(r, material.trap.N_t);
}

double leakage_current(const DiodeDesign& design, const PotentialSolution& solution,
                       const MaterialParams& material) {
    const DepletionProfile dep = depletion_profile(solution, design, material);
    const Span span = depletion_span(design, dep);
    if (!(span.width() > 0.0)) return 0.0;
    RateContext ctx(design.T, material);

    // Trapezoid on the solver grid restricted to the span, exact endpoints.
    std::vector<double> zs{span.lo};
    for (int i = 0; i < solution.z.size(); ++i)
        if (solution.z[i] > span.lo && solution.z[i] < span.hi) zs.push_back(solution.z[i]);
    zs.push_back(span.hi);

    double integral = 0.0;  // [cm^-3 s^-1 * um]
    double g_prev = generation_from_rates(emission_rates_impl(ctx, solution.field_at(zs[0])),
                                          material.trap.N_t);
    for (size_t i = 1; i < zs.size(); ++i) {
        const double g = generation_from_rates(emission_rates_impl(ctx, solution.field_at(zs[i])),
                                               material.trap.N_t);
        integral += 0.5 * (g + g_prev) * (zs[i] - zs[i - 1]);
        g_prev = g;
    }
    const double um_to_cm = 1e-4;
    return constants::q_e * integral * um_to_cm;  // A/cm^2
}

double drift_velocity(double E_V_per_cm, double total_doping_cm3, const MaterialParams& material) {
    if (!(E_V_per_cm >= 0.0)) throw DomainError("drift_velocity: field must be >= 0");
    if (!(total_doping_cm3 > 0.0)) throw DomainError("drift_velocity: doping must be > 0");
    const MobilityFit& f = material.mobility;
    const double mu0 =
        f.mu_min + (f.mu_max - f.mu_min) / (1.0 + std::pow(total_doping_cm3 / f.N_ref, f.alpha_fit));
    if (E_V_per_cm == 0.0) return 0.0;
    const double x = mu0 * E_V_per_cm / f.v_sat;
    const double mu = mu0 / std::pow(1.0 + std::pow(x, f.beta_fit), 1.0 / f.beta_fit);
    return mu * E_V_per_cm;  // cm/s
}

TrapDensityProfile effective_density(const DiodeDesign& design, const PotentialSolution& solution,
                                     const MaterialParams& material) {
    const DepletionProfile dep = depletion_profile(solution, design, material);
    const Span span = depletion_span(design, dep);
    if (!(span.width() > 0.0))
        throw DomainError("effective_density: no depletion region at this bias");
    RateContext ctx(design.T, material);
    const double total_doping = design.N_a + design.N_n + design.N_d;

    std::vector<double> zs{span.lo};
    for (int i = 0; i < solution.z.size(); ++i)
        if (solution.z[i] > span.lo && solution.z[i] < span.hi) zs.push_back(solution.z[i]);
    zs.push_back(span.hi);

    const double um_to_cm = 1e-4;
    const size_t m = zs.size();
    std::vector<double> G(m), cumG(m);
    for (size_t i = 0; i < m; ++i)
        G[i] = generation_from_rates(emission_rates_impl(ctx, solution.field_at(zs[i])),
                                     material.trap.N_t);
    cumG[0] = 0.0;
    for (size_t i = 1; i < m; ++i)
        cumG[i] = cumG[i - 1] + 0.5 * (G[i] + G[i - 1]) * (zs[i] - zs[i - 1]) * um_to_cm;

    double outer = 0.0;  // [cm^-3 * um]
    auto integrand = [&](size_t i) {
        if (cumG[i] == 0.0) return 0.0;
        const double v = drift_velocity(std::abs(solution.field_at(zs[i])), total_doping, material);
        const double v_floor = 1e-6 * material.mobility.v_sat;  // edge nodes where E ~ 0
        return cumG[i] / std::max(v, v_floor);
    };
    double prev = integrand(0);
    for (size_t i = 1; i < m; ++i) {
        const double cur = integrand(i);
        outer += 0.5 * (cur + prev) * (zs[i] - zs[i - 1]);
        prev = cur;
    }
    const double W_um = span.width();
    const double n_eff = outer / W_um;  // [cm^-3]

    // Half-Gaussian depth profile, Simpson-normalized so that the integral on
    // [0, D] equals n_eff * D.
    TrapDensityProfile out;
    out.n_eff = n_eff;
    const int n_nodes = 1025;
    const double D = material.trap.D_depth;
    const double s = material.trap.fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    out.x.resize(n_nodes);
    out.n_V.resize(n_nodes);
    Eigen::VectorXd g(n_nodes);
    const double h = D / (n_nodes - 1);
    for (int i = 0; i < n_nodes; ++i) {
        out.x[i] = i * h;
        g[i] = std::exp(-out.x[i] * out.x[i] / (2.0 * s * s));
    }
    const double norm = simpson_uniform(g, h);
    for (int i = 0; i < n_nodes; ++i) out.n_V[i] = n_eff * D * g[i] / norm;
    return out;
}

namespace {

// Simpson of n_V(x') / |x - x'|^p over the stored profile, SI output.
double kernel_integral(const TrapDensityProfile& profile, double x_def_nm, double power) {
    namespace c = constants;
    const int n = static_cast<int>(profile.x.size());
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double dist = (x_def_nm - profile.x[i]) * c::nm_to_m;
        y[i] = profile.n_V[i] * c::per_cm3_to_SI / std::pow(std::abs(dist), power);
    }
    const double h = (profile.x[1] - profile.x[0]) * c::nm_to_m;
    return simpson_uniform(y, h);
}

}  // namespace

double surface_electric_linewidth(const TrapDensityProfile& profile, double x_def_nm,
                                  const SpinCenterParams& spin, const MaterialParams& material) {
    const double D = profile.x[profile.x.size() - 1];
    if (!(x_def_nm > D))
        throw DomainError("surface_electric_linewidth: defect must sit below the trap layer");
    namespace c = constants;
    const double eps = material.permittivity();
    const double angular = kPi * (3.0 + std::cos(2.0 * spin.theta)) / 8.0;
    const double coulomb = c::q_e / (4.0 * kPi * eps);
    const double a_x = angular * coulomb * coulomb * kernel_integral(profile, x_def_nm, 4.0);
    const double dvar_m2 = spin.dipole_var * 1e-18;  // (e nm)^2 -> displacement variance in m^2
    const double dE_z = std::sqrt(dvar_m2 * a_x) * c::V_per_m_to_V_per_cm;
    const double gamma_Hz = std::sqrt(2.0 * std::log(2.0) / kPi) * spin.mu_z * dE_z;
    return gamma_Hz * 1e-6;
}

double surface_magnetic_linewidth(const TrapDensityProfile& profile, double x_def_nm,
                                  const SpinCenterParams& spin, const MaterialParams& material,
                                  double T) {
    const double D = profile.x[profile.x.size() - 1];
    if (!(x_def_nm > D))
        throw DomainError("surface_magnetic_linewidth: defect must sit below the trap layer");
    if (!spin.tau_e)
        throw DomainError("surface_magnetic_linewidth: tau_e unresolved; default it from mobility");
    namespace c = constants;
    const double m_c = material.m_c * c::m_e0;
    const double S_B = c::k_B * T * c::mu0_mag * c::mu0_mag * c::q_e * c::q_e * (*spin.tau_e) /
                       (8.0 * kPi * m_c) * kernel_integral(profile, x_def_nm, 2.0);
    const double eta = 8.0 * kPi * c::mu_B * c::mu_B * spin.g_eff * spin.g_eff / (c::h * c::h);
    return eta * S_B * 1e-6;  // MHz
}

LeakageResult leakage_report(const DiodeDesign& design, const MaterialParams& material,
                             const SpinCenterParams& spin, const GridConfig& grid) {
    const PotentialSolution sol = solve_poisson(design, material, grid);
    LeakageResult out;
    out.J_tat = leakage_current(design, sol, material);
    out.profile = effective_density(design, sol, material);
    out.n_eff = out.profile.n_eff;

    SpinCenterParams resolved = spin;
    if (!resolved.tau_e) {
        const MobilityFit& f = material.mobility;
        const double total = design.N_a + design.N_n + design.N_d;
        const double mu0_cm2 =
            f.mu_min + (f.mu_max - f.mu_min) / (1.0 + std::pow(total / f.N_ref, f.alpha_fit));
        resolved.tau_e = mu0_cm2 * 1e-4 * material.m_star * constants::m_e0 / constants::q_e;
    }
    out.gamma_E_surface = surface_electric_linewidth(out.profile, spin.x_def, resolved, material);
    out.gamma_B_surface =
        surface_magnetic_linewidth(out.profile, spin.x_def, resolved, material, design.T);
    return out;
}

}  // namespace diodeopt
