#include "diodeopt/linewidth.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "diodeopt/errors.hpp"

namespace diodeopt {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One shell term: (e/4pi eps) * d_i * sqrt(pi/(3 Omega)) * sqrt(1/a^3 - 1/b^3)
// with Omega = 1/N and d_i = Omega^{1/3}. N in cm^-3, a/b in um, result V/cm.
double shell_term(double N_cm3, double a_um, double b_um, double eps, const char* label) {
    namespace c = constants;
    if (!(a_um > 0.0) || !(b_um > 0.0) || b_um < a_um)
        throw DomainError(std::string("delta_E_total: impossible geometry in the ") + label +
                          " term (near " + std::to_string(a_um) + " um, far " +
                          std::to_string(b_um) + " um)");
    const double N = N_cm3 * c::per_cm3_to_SI;               // m^-3
    const double a = a_um * c::um_to_m, b = b_um * c::um_to_m;
    const double bracket = 1.0 / (a * a * a) - 1.0 / (b * b * b);
    if (bracket < 0.0)
        throw DomainError(std::string("delta_E_total: negative bracket in the ") + label + " term");
    const double coeff = c::q_e / (4.0 * kPi * eps) * std::sqrt(kPi / 3.0) * std::pow(N, 1.0 / 6.0);
    return coeff * std::sqrt(bracket) * c::V_per_m_to_V_per_cm;
}

// Local-carrier term e/(sqrt(2) pi eps) * N^{2/3}; N in cm^-3, result V/cm.
double bulk_term(double N_cm3, double eps) {
    namespace c = constants;
    const double N = N_cm3 * c::per_cm3_to_SI;
    return c::q_e / (std::sqrt(2.0) * kPi * eps) * std::cbrt(N * N) * c::V_per_m_to_V_per_cm;
}

double quad_sum(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

}  // namespace

DeltaEResult delta_E_total(const DiodeDesign& design, const DepletionProfile& depletion,
                           double z_def_um, const MaterialParams& material) {
    if (!(z_def_um > 0.0) || !(z_def_um < design.d))
        throw DomainError("delta_E_total: z_def must lie inside (0, d), got " +
                          std::to_string(z_def_um) + " um");
    const double eps = material.permittivity();
    const double z = z_def_um;

    const double e_nplus = shell_term(design.N_d, design.d + depletion.d_n_plus - z,
                                      design.d + design.d_r - z, eps, "n+");
    const double e_p =
        shell_term(design.N_a, depletion.d_p + z, design.d_l + z, eps, "p");

    auto depleted_total = [&]() -> DeltaEResult {
        // Noise from the non-depleted tail of the n region, [dn_tilde, d].
        const double near = depletion.dn_tilde - z;
        double e_n = 0.0;
        if (depletion.dn_tilde >= design.d) {
            e_n = 0.0;  // no tail left
        } else if (near <= 0.0) {
            e_n = std::numeric_limits<double>::infinity();
        } else {
            e_n = shell_term(design.N_n, near, design.d - z, eps, "n");
        }
        DeltaEResult r;
        r.components = {e_nplus, e_p, e_n, kNaN, true};
        r.total = quad_sum(e_nplus, e_p, e_n);
        return r;
    };
    auto bulk_total = [&]() -> DeltaEResult {
        const double e_n = bulk_term(design.N_n, eps);
        DeltaEResult r;
        r.components = {e_nplus, e_p, kNaN, e_n, false};
        r.total = quad_sum(e_nplus, e_p, e_n);
        return r;
    };

    if (z < depletion.dn_tilde) return depleted_total();
    if (z > depletion.dn_tilde) return bulk_total();
    // Exactly on the boundary: the branch value is undefined, take the smaller.
    DeltaEResult a = depleted_total();
    DeltaEResult b = bulk_total();
    return a.total <= b.total ? a : b;
}

double linewidth_majority(double delta_E_V_per_cm, const SpinCenterParams& spin) {
    if (!(delta_E_V_per_cm >= 0.0)) throw DomainError("linewidth_majority: |dE| must be >= 0");
    const double dEz = delta_E_V_per_cm / std::sqrt(3.0);  // isotropic noise
    const double gamma_Hz = std::sqrt(2.0 * std::log(2.0) / kPi) * spin.mu_z * dEz;
    return gamma_Hz * 1e-6;
}

DefectOptimum optimal_defect_position(const DiodeDesign& design, const DepletionProfile& depletion,
                                      const MaterialParams& material, const SpinCenterParams& spin) {
    auto gamma_at = [&](double z) {
        return linewidth_majority(delta_E_total(design, depletion, z, material).total, spin);
    };

    constexpr int kScan = 512;
    double best_z = 0.0, best_g = std::numeric_limits<double>::infinity();
    int best_i = 1;
    for (int i = 1; i <= kScan; ++i) {
        const double z = design.d * i / (kScan + 1.0);
        const double g = gamma_at(z);
        if (g < best_g) {
            best_g = g;
            best_z = z;
            best_i = i;
        }
    }

    // Golden-section refinement on the bracket around the best scan point.
    double lo = design.d * (best_i - 1) / (kScan + 1.0);
    double hi = design.d * (best_i + 1) / (kScan + 1.0);
    lo = std::max(lo, design.d * 1e-9);
    hi = std::min(hi, design.d * (1.0 - 1e-9));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = gamma_at(x1), f2 = gamma_at(x2);
    const double tol = 1e-4 * design.d;
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = gamma_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = gamma_at(x2);
        }
    }
    const double z_ref = f1 <= f2 ? x1 : x2;
    const double g_ref = std::min(f1, f2);
    if (g_ref < best_g) {
        best_z = z_ref;
        best_g = g_ref;
    }
    return DefectOptimum{best_z, best_g};
}

DefectOptimum optimal_defect_position(const DiodeDesign& design, const MaterialParams& material,
                                      const SpinCenterParams& spin, const GridConfig& grid) {
    const PotentialSolution sol = solve_poisson(design, material, grid);
    const DepletionProfile dep = depletion_profile(sol, design, material);
    return optimal_defect_position(design, dep, material, spin);
}

double lineshape_eval(double omega, Lineshape kind, double width_param) {
    if (!(width_param > 0.0)) throw DomainError("lineshape_eval: width must be > 0");
    const double g = width_param;
    switch (kind) {
        case Lineshape::gaussian:
            return std::exp(-omega * omega / (4.0 * g * g)) / (2.0 * std::sqrt(kPi) * g);
        case Lineshape::lorentzian:
            return (1.0 / kPi) * g / (g * g + omega * omega);
    }
    throw DomainError("lineshape_eval: unknown line shape");
}

}  // namespace diodeopt
