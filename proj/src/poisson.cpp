#include "diodeopt/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "diodeopt/errors.hpp"

namespace diodeopt {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kRegulatorBound = 308.0;  // exponent cap in decades

// All quantities SI. psi is the dimensionless potential; the charge density
// below is exactly the regularized form of the occupancy/carrier expressions,
// so boundary neutrality and the Newton residual share one code path.
struct PoissonCore {
    double q, kT, eps;
    double C0;               // sqrt(Nc*Pv) [m^-3]
    double Na, Nn, Nd;       // [m^-3]
    double zl, zj1, zr;      // region boundaries [m]; p/n junction at 0
    double Eg_kT;
    double xa_off;           // (eps_a - eps_i - Eg/2)/kT
    double xd_off;           // (Eg/2 - eps_d + eps_i + eV)/kT
    double V_kT;             // eV/kT
    double mu_l_J = 0.0;     // [J], set once boundary levels are known
    double eps_i_J;
    // Half cell width for dopant-window averaging. Zero means pointwise
    // Heaviside windows; the solver sets h/2 so that the assigned dopant
    // charge varies smoothly as a junction crosses a cell (keeps the scheme
    // second order and the solution smooth in the layer lengths).
    double cell_half = 0.0;

    PoissonCore(const DiodeDesign& d, const MaterialParams& m) {
        namespace c = constants;
        q = c::q_e;
        kT = c::k_B * d.T;
        eps = m.permittivity();
        const double Nc = effective_dos(d.T, m.m_c) * c::per_cm3_to_SI;
        const double Pv = effective_dos(d.T, m.m_v) * c::per_cm3_to_SI;
        C0 = std::sqrt(Nc * Pv);
        Na = d.N_a * c::per_cm3_to_SI;
        Nn = d.N_n * c::per_cm3_to_SI;
        Nd = d.N_d * c::per_cm3_to_SI;
        zl = -d.d_l * c::um_to_m;
        zj1 = d.d * c::um_to_m;
        zr = (d.d + d.d_r) * c::um_to_m;
        const double eps_i = intrinsic_fermi_energy(d.T, m) * c::eV_to_J;
        eps_i_J = eps_i;
        const double Eg = m.E_g * c::eV_to_J;
        Eg_kT = Eg / kT;
        V_kT = q * d.V / kT;
        xa_off = (m.eps_a * c::eV_to_J - eps_i - 0.5 * Eg) / kT;
        xd_off = (0.5 * Eg - m.eps_d * c::eV_to_J + eps_i + q * d.V) / kT;
    }

    static double regulated_exp(double x) { return std::exp(sigmoid_regulator(x, kRegulatorBound)); }

    // Unregulated pieces, exponent-clamped only against overflow. Used for the
    // contact neutrality roots, where every relevant exponent is moderate and
    // the regulator's soft distortion would shift the root.
    static double raw_exp(double x) { return std::exp(std::min(x, 705.0)); }
    double raw_rho(double z, double psi) const {
        const double n = C0 * raw_exp(psi + V_kT);
        const double p = C0 * raw_exp(-psi - Eg_kT);
        double rho = p - n;
        if (z < 0.0 && z >= zl) rho -= Na / (2.0 * raw_exp(-psi + xa_off) + 1.0);
        else if (z >= 0.0 && z < zj1) rho += Nn / (2.0 * raw_exp(psi + xd_off) + 1.0);
        else if (z >= zj1 && z <= zr) rho += Nd / (2.0 * raw_exp(psi + xd_off) + 1.0);
        return q * rho;
    }

    // Fermi factor 1/(2 e^{S(x)} + 1) and its derivative w.r.t. x.
    static void occupancy(double x, double& f, double& df) {
        const double u = x / (kRegulatorBound * kLn10);
        const double t = std::tanh(u);
        const double e = std::exp(kRegulatorBound * kLn10 * t);
        const double denom = 2.0 * e + 1.0;
        f = 1.0 / denom;
        df = -2.0 * e * (1.0 - t * t) / (denom * denom);
    }

    double electron_density(double psi) const { return C0 * regulated_exp(psi + V_kT); }
    double hole_density(double psi) const { return C0 * regulated_exp(-psi - Eg_kT); }

    // Fraction of the node cell [z-cell_half, z+cell_half] inside [lo, hi);
    // pointwise indicator when cell_half is zero.
    double window_weight(double z, double lo, double hi) const {
        if (cell_half <= 0.0) return (z >= lo && z < hi) ? 1.0 : 0.0;
        const double a = std::max(z - cell_half, lo);
        const double b = std::min(z + cell_half, hi);
        return std::max(0.0, b - a) / (2.0 * cell_half);
    }

    // rho [C/m^3] and d(rho)/d(psi); z decides the dopant windows.
    void rho_and_deriv(double z, double psi, double& rho, double& drho) const {
        const double un = (psi + V_kT) / (kRegulatorBound * kLn10);
        const double tn = std::tanh(un);
        const double n = C0 * std::exp(kRegulatorBound * kLn10 * tn);
        const double dn = n * (1.0 - tn * tn);

        const double up = (-psi - Eg_kT) / (kRegulatorBound * kLn10);
        const double tp = std::tanh(up);
        const double p = C0 * std::exp(kRegulatorBound * kLn10 * tp);
        const double dp = -p * (1.0 - tp * tp);

        rho = p - n;
        drho = dp - dn;
        const double w_p = window_weight(z, zl, 0.0);
        const double w_n = window_weight(z, 0.0, zj1);
        const double w_np = cell_half > 0.0 ? window_weight(z, zj1, zr + cell_half)
                                            : (z >= zj1 && z <= zr ? 1.0 : 0.0);
        if (w_p > 0.0) {
            double f, df;
            occupancy(-psi + xa_off, f, df);
            rho -= w_p * Na * f;
            drho += w_p * Na * df;
        }
        if (w_n > 0.0 || w_np > 0.0) {
            double f, df;
            occupancy(psi + xd_off, f, df);
            rho += (w_n * Nn + w_np * Nd) * f;
            drho += (w_n * Nn + w_np * Nd) * df;
        }
        rho *= q;
        drho *= q;
    }

    double rho_of(double z, double psi) const {
        double r, dr;
        rho_and_deriv(z, psi, r, dr);
        return r;
    }

    double psi_of_phi(double phi) const { return (q * phi + mu_l_J - eps_i_J - 0.5 * Eg_kT * kT) / kT; }
    double phi_of_psi(double psi) const { return (kT * psi - mu_l_J + eps_i_J + 0.5 * Eg_kT * kT) / q; }
};

// Monotone-decreasing scalar root by bisection; f(lo) > 0 > f(hi) expected.
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, const char* label) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo > 0.0) || !(fhi < 0.0)) {
        throw SolveError(std::string("boundary_levels: failed to bracket the ") + label +
                             " neutrality root",
                         std::max(std::abs(flo), std::abs(fhi)), 0);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct NewtonResult {
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
};

// Damped Newton for psi'' + (1/kT)*q*rho(z,psi)/eps = 0 with fixed ends.
// Tridiagonal Jacobian, Thomas solve, residual-norm backtracking.
NewtonResult newton_solve(const PoissonCore& core, const Eigen::VectorXd& z_m, double psi_left,
                          double psi_right, const GridConfig& grid, Eigen::VectorXd& psi) {
    const int n = static_cast<int>(z_m.size());
    const double h = z_m[1] - z_m[0];
    const double inv_h2 = 1.0 / (h * h);
    const double source_scale = core.q / (core.kT * core.eps);
    const double N_max = std::max({core.Na, core.Nn, core.Nd});
    const double F_scale = source_scale * core.q * N_max;  // residual of a fully charged node

    psi[0] = psi_left;
    psi[n - 1] = psi_right;

    Eigen::VectorXd F(n), diag(n), rhs(n), cprime(n), trial(n);

    auto residual_norm = [&](const Eigen::VectorXd& v, Eigen::VectorXd* out) -> double {
        double norm2 = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            double rho, drho;
            core.rho_and_deriv(z_m[i], v[i], rho, drho);
            const double Fi = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2 + source_scale * rho;
            if (out) {
                (*out)[i] = Fi;
                diag[i] = -2.0 * inv_h2 + source_scale * drho;
            }
            norm2 += Fi * Fi;
        }
        return std::sqrt(norm2);
    };

    NewtonResult result;
    double fnorm = residual_norm(psi, &F);
    for (int it = 0; it < grid.newton_max_iter; ++it) {
        result.iterations = it;
        double max_abs_F = 0.0;
        for (int i = 1; i + 1 < n; ++i) max_abs_F = std::max(max_abs_F, std::abs(F[i]));
        result.residual = max_abs_F / F_scale;
        if (result.residual < grid.newton_tol) {
            result.converged = true;
            return result;
        }

        // Thomas sweep on the interior block; off-diagonals are all inv_h2.
        {
            const int lo = 1, hi = n - 2;
            cprime[lo] = inv_h2 / diag[lo];
            rhs[lo] = -F[lo] / diag[lo];
            for (int i = lo + 1; i <= hi; ++i) {
                const double m = diag[i] - inv_h2 * cprime[i - 1];
                cprime[i] = inv_h2 / m;
                rhs[i] = (-F[i] - inv_h2 * rhs[i - 1]) / m;
            }
            for (int i = hi - 1; i >= lo; --i) rhs[i] -= cprime[i] * rhs[i + 1];
        }

        double t = std::clamp(grid.damping, 0.0, 1.0);
        if (t <= 0.0) t = 1.0;
        const double t_floor = std::ldexp(1.0, -20);
        double new_norm = 0.0;
        while (true) {
            trial = psi;
            for (int i = 1; i + 1 < n; ++i) trial[i] += t * rhs[i];
            new_norm = residual_norm(trial, nullptr);
            if (new_norm <= fnorm || t <= t_floor) break;
            t *= 0.5;
        }
        psi = trial;
        fnorm = residual_norm(psi, &F);
    }
    double max_abs_F = 0.0;
    for (int i = 1; i + 1 < n; ++i) max_abs_F = std::max(max_abs_F, std::abs(F[i]));
    result.residual = max_abs_F / F_scale;
    result.converged = result.residual < grid.newton_tol;
    result.iterations = grid.newton_max_iter;
    return result;
}

double interp_uniform(const Eigen::VectorXd& z, const Eigen::VectorXd& y, double x) {
    const int n = static_cast<int>(z.size());
    if (x <= z[0]) return y[0];
    if (x >= z[n - 1]) return y[n - 1];
    const double h = z[1] - z[0];
    int i = static_cast<int>((x - z[0]) / h);
    i = std::clamp(i, 0, n - 2);
    const double w = (x - z[i]) / h;
    return (1.0 - w) * y[i] + w * y[i + 1];
}

}  // namespace

void DiodeDesign::validate() const {
    if (!(N_a > 0.0) || !(N_n > 0.0) || !(N_d > 0.0))
        throw DomainError("diode densities must be > 0");
    if (!(d_l > 0.0) || !(d > 0.0) || !(d_r > 0.0))
        throw DomainError("diode layer lengths must be > 0");
    if (!(T > 0.0)) throw DomainError("diode temperature must be > 0");
    if (!std::isfinite(V)) throw DomainError("bias voltage must be finite");
}

void GridConfig::validate() const {
    if (n_points < 101) throw DomainError("grid needs at least 101 nodes");
    if (!(newton_tol > 0.0)) throw DomainError("newton_tol must be > 0");
    if (newton_max_iter < 1) throw DomainError("newton_max_iter must be >= 1");
    if (!(damping > 0.0) || !(damping <= 1.0)) throw DomainError("damping must be in (0, 1]");
}

double sigmoid_regulator(double x, double a) {
    if (!(a > 0.0)) throw DomainError("sigmoid_regulator: bound must be > 0");
    const double s = a * kLn10;
    return s * std::tanh(x / s);
}

double PotentialSolution::field_at(double z_um) const { return interp_uniform(z, E_field, z_um); }

double PotentialSolution::carriers_at(double z_um) const {
    return interp_uniform(z, n_e, z_um) + interp_uniform(z, p_h, z_um);
}

BoundaryLevels boundary_levels(const DiodeDesign& design, const MaterialParams& material) {
    design.validate();
    material.validate();
    PoissonCore core(design, material);
    namespace c = constants;
    const double kT = core.kT;
    const double eps_i = core.eps_i_J;
    const double Eg = material.E_g * c::eV_to_J;

    // mu_l from rho(z=-d_l, psi(mu)) = 0 with phi(-d_l) = 0.
    auto p_side = [&](double mu_J) {
        const double psi = (mu_J - eps_i - 0.5 * Eg) / kT;
        return core.raw_rho(core.zl, psi);
    };
    const double lo_mu = (material.eps_v - 1.0) * c::eV_to_J;
    const double hi_mu = (material.eps_c + 1.0) * c::eV_to_J;
    const double mu_l_J = bisect_decreasing(p_side, lo_mu, hi_mu, "left (mu_l)");

    // Residual sanity: compare against the dominant term of the neutrality sum.
    {
        const double psi = (mu_l_J - eps_i - 0.5 * Eg) / kT;
        const double dominant =
            core.q * std::max({core.hole_density(psi), core.electron_density(psi), core.Na});
        if (std::abs(p_side(mu_l_J)) > 1e-10 * dominant)
            throw SolveError("boundary_levels: left neutrality residual too large",
                             std::abs(p_side(mu_l_J)) / dominant, 0);
    }

    // phi_inf from rho(z=d+d_r, psi(phi)) = 0 given mu_l.
    core.mu_l_J = mu_l_J;
    auto n_side = [&](double phi_V) {
        const double psi = (core.q * phi_V + mu_l_J - eps_i - 0.5 * Eg) / kT;
        return core.raw_rho(core.zr, psi);
    };
    const double lo_phi = -1.0;
    const double hi_phi = material.E_g + std::max(0.0, -design.V) + 10.0;
    const double phi_inf = bisect_decreasing(n_side, lo_phi, hi_phi, "right (phi_inf)");
    {
        const double psi = (core.q * phi_inf + mu_l_J - eps_i - 0.5 * Eg) / kT;
        const double dominant =
            core.q * std::max({core.hole_density(psi), core.electron_density(psi), core.Nd});
        if (std::abs(n_side(phi_inf)) > 1e-10 * dominant)
            throw SolveError("boundary_levels: right neutrality residual too large",
                             std::abs(n_side(phi_inf)) / dominant, 0);
    }

    return BoundaryLevels{mu_l_J / c::eV_to_J, phi_inf};
}

double charge_density(double psi, double z_um, const DiodeDesign& design,
                      const MaterialParams& material) {
    if (z_um < design.z_left() - 1e-12 || z_um > design.z_right() + 1e-12)
        throw DomainError("charge_density: z outside the diode domain");
    PoissonCore core(design, material);
    double rho, drho;
    core.rho_and_deriv(z_um * constants::um_to_m, psi, rho, drho);
    return rho * 1e-6;  // C/m^3 -> C/cm^3
}

PotentialSolution solve_poisson(const DiodeDesign& design, const MaterialParams& material,
                                const GridConfig& grid) {
    design.validate();
    material.validate();
    grid.validate();
    namespace c = constants;

    const int n = grid.n_points;
    Eigen::VectorXd z_um(n), z_m(n);
    const double h_um = grid.spacing(design);
    for (int i = 0; i < n; ++i) {
        z_um[i] = design.z_left() + h_um * i;
        z_m[i] = z_um[i] * c::um_to_m;
    }

    // Continuation ladder in bias for |V| > 100 V.
    std::vector<double> rungs;
    if (std::abs(design.V) <= 100.0) {
        rungs.push_back(design.V);
    } else {
        const double sgn = design.V > 0.0 ? 1.0 : -1.0;
        for (double mag = 100.0; mag < std::abs(design.V); mag += 100.0) rungs.push_back(sgn * mag);
        rungs.push_back(design.V);
    }

    Eigen::VectorXd psi(n);
    double prev_psi_left = 0.0, prev_psi_right = 0.0;
    bool have_prev = false;
    PoissonCore final_core(design, material);
    NewtonResult last{};
    BoundaryLevels levels{};

    for (double V_k : rungs) {
        DiodeDesign step = design;
        step.V = V_k;
        levels = boundary_levels(step, material);
        PoissonCore core(step, material);
        core.mu_l_J = levels.mu_l * c::eV_to_J;
        core.cell_half = 0.5 * h_um * c::um_to_m;
        const double psi_left = core.psi_of_phi(0.0);
        const double psi_right = core.psi_of_phi(levels.phi_inf);

        if (!have_prev) {
            // Neutral bulk on both sides, linear across the n region.
            for (int i = 0; i < n; ++i) {
                if (z_um[i] <= 0.0)
                    psi[i] = psi_left;
                else if (z_um[i] >= design.d)
                    psi[i] = psi_right;
                else
                    psi[i] = psi_left + (psi_right - psi_left) * (z_um[i] / design.d);
            }
        } else {
            const double dL = psi_left - prev_psi_left;
            const double dR = psi_right - prev_psi_right;
            for (int i = 0; i < n; ++i) {
                double ramp = 0.0;
                if (z_um[i] >= design.d)
                    ramp = 1.0;
                else if (z_um[i] > 0.0)
                    ramp = z_um[i] / design.d;
                psi[i] += dL * (1.0 - ramp) + dR * ramp;
            }
        }

        last = newton_solve(core, z_m, psi_left, psi_right, grid, psi);
        if (!last.converged) {
            throw SolveError("solve_poisson: Newton failed at V=" + std::to_string(V_k) +
                                 " V (scaled residual " + std::to_string(last.residual) + ")",
                             last.residual, last.iterations);
        }
        prev_psi_left = psi_left;
        prev_psi_right = psi_right;
        have_prev = true;
        if (V_k == design.V) final_core = core;
    }

    PotentialSolution sol;
    sol.z = z_um;
    sol.psi = psi;
    sol.mu_l = levels.mu_l;
    sol.phi_inf = levels.phi_inf;
    sol.converged = last.converged;
    sol.residual = last.residual;
    sol.newton_iterations = last.iterations;

    sol.phi.resize(n);
    sol.n_e.resize(n);
    sol.p_h.resize(n);
    sol.rho_c.resize(n);
    // phi as an exact shift from the left contact keeps phi(z_left) = 0
    // bit-exactly (the absolute form costs a rounding ulp).
    const double kT_over_q = final_core.kT / final_core.q;
    for (int i = 0; i < n; ++i) {
        sol.phi[i] = kT_over_q * (psi[i] - psi[0]);
        const double ne = final_core.electron_density(psi[i]);
        const double ph = final_core.hole_density(psi[i]);
        sol.n_e[i] = ne * c::per_m3_to_cm3;
        sol.p_h[i] = ph * c::per_m3_to_cm3;
        sol.rho_c[i] = constants::q_e * (sol.p_h[i] - sol.n_e[i]);  // C/cm^3
    }

    // E = -dphi/dz, central differences inside, one-sided second order at ends.
    sol.E_field.resize(n);
    const double h_m = h_um * c::um_to_m;
    for (int i = 1; i + 1 < n; ++i)
        sol.E_field[i] = -(sol.phi[i + 1] - sol.phi[i - 1]) / (2.0 * h_m);
    sol.E_field[0] = -(-3.0 * sol.phi[0] + 4.0 * sol.phi[1] - sol.phi[2]) / (2.0 * h_m);
    sol.E_field[n - 1] = -(3.0 * sol.phi[n - 1] - 4.0 * sol.phi[n - 2] + sol.phi[n - 3]) / (2.0 * h_m);
    sol.E_field *= c::V_per_m_to_V_per_cm;

    return sol;
}

namespace {

// Crossing of carriers(z) with the threshold between a depleted node (index a)
// and a populated node (index b), interpolated on log density.
double log_crossing(const PotentialSolution& s, int a, int b, double threshold) {
    const double ca = std::max(s.n_e[a] + s.p_h[a], 1e-300);
    const double cb = std::max(s.n_e[b] + s.p_h[b], 1e-300);
    const double la = std::log(ca), lb = std::log(cb), lt = std::log(threshold);
    if (lb == la) return s.z[a];
    const double w = std::clamp((lt - la) / (lb - la), 0.0, 1.0);
    return s.z[a] + w * (s.z[b] - s.z[a]);
}

}  // namespace

DepletionProfile depletion_profile(const PotentialSolution& solution, const DiodeDesign& design,
                                   const MaterialParams& material) {
    DepletionProfile out;
    const int n = static_cast<int>(solution.z.size());
    const double h = solution.z[1] - solution.z[0];
    auto carriers = [&](int i) { return solution.n_e[i] + solution.p_h[i]; };

    // Node ranges per region.
    int first_n = 0;
    while (first_n < n && solution.z[first_n] < 0.0) ++first_n;
    int first_np = first_n;
    while (first_np < n && solution.z[first_np] < design.d) ++first_np;

    // p side: walk left from the junction.
    {
        const double thr = 0.01 * design.N_a;
        int i = first_n - 1;
        while (i >= 0 && carriers(i) < thr) --i;
        if (i == first_n - 1) {
            out.d_p = 0.0;
        } else if (i < 0) {
            out.d_p = design.d_l;
        } else {
            out.d_p = -log_crossing(solution, i + 1, i, thr);
        }
    }

    // n region: populated nodes hugging either junction are carrier
    // spill-over (holes across the p/n junction, electrons across n/n+), not
    // neutral bulk; their reach is the thermal decay kT/(qE) times the log of
    // the density drop. The depleted width is the longest depleted run, full
    // depletion meaning that run extends into the right spill zone.
    {
        const double thr = 0.01 * design.N_n;
        const double kT_eV = constants::k_B * design.T / constants::q_e;
        auto spill_um = [&](double E_V_per_cm, double N_from) {
            const double decay_um = kT_eV / std::max(std::abs(E_V_per_cm), 1e-3) * 1e4;
            return std::min(0.25 * design.d,
                            std::max(3.0 * h, std::log(std::max(N_from / thr, 3.0)) * decay_um));
        };
        const double w_left = spill_um(solution.field_at(0.0), design.N_a);
        const double w_right = spill_um(solution.field_at(design.d), design.N_d);

        int best_a = -1, best_b = -2;
        int run_a = -1;
        for (int i = first_n; i <= first_np; ++i) {
            const bool depleted = i < first_np && carriers(i) < thr;
            if (depleted && run_a < 0) run_a = i;
            if (!depleted && run_a >= 0) {
                if (i - run_a > best_b - best_a) {
                    best_a = run_a;
                    best_b = i - 1;
                }
                run_a = -1;
            }
        }
        if (best_a < 0) {
            out.dn_tilde = 0.0;
        } else if (solution.z[best_a] > w_left) {
            out.dn_tilde = 0.0;  // detached from the junction
        } else if (best_b + 1 >= first_np || solution.z[best_b] > design.d - w_right) {
            out.dn_tilde = design.d;
        } else {
            out.dn_tilde = log_crossing(solution, best_b, best_b + 1, thr);
        }
        out.fully_depleted_n = out.dn_tilde >= design.d;
    }

    // n+ region: walk right from the n/n+ junction.
    {
        const double thr = 0.01 * design.N_d;
        int i = first_np;
        while (i < n && carriers(i) < thr) ++i;
        if (i == first_np) {
            out.d_n_plus = 0.0;
        } else if (i >= n) {
            out.d_n_plus = design.d_r;
        } else {
            out.d_n_plus = log_crossing(solution, i - 1, i, thr) - design.d;
        }
    }

    out.d_p = std::clamp(out.d_p, 0.0, design.d_l);
    out.dn_tilde = std::clamp(out.dn_tilde, 0.0, design.d);
    out.d_n_plus = std::clamp(out.d_n_plus, 0.0, design.d_r);

    // Closed forms with phi_inf ~ Eg/e - V.
    namespace c = constants;
    const double eps = material.permittivity();
    const double Na = design.N_a * c::per_cm3_to_SI;
    const double Nn = design.N_n * c::per_cm3_to_SI;
    const double phi_apx = material.E_g - design.V;  // [V]
    const double dn2 = (2.0 * eps * phi_apx / c::q_e) * (Na / Nn) / (Na + Nn);
    out.d_n_analytic = std::sqrt(std::max(dn2, 0.0)) * c::m_to_um;
    const double d_m = design.d * c::um_to_m;
    out.V_c = -(c::q_e * d_m * d_m / (2.0 * eps)) * Nn * (Na + Nn) / Na;
    return out;
}

}  // namespace diodeopt
