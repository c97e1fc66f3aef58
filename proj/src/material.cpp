#include "diodeopt/material.hpp"

#include <cmath>
#include <string>

#include "diodeopt/errors.hpp"

namespace diodeopt {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void MobilityFit::validate() const {
    if (!(mu_min > 0.0) || !(mu_max >= mu_min)) throw DomainError("mobility fit requires mu_max >= mu_min > 0");
    if (!(N_ref > 0.0)) throw DomainError("mobility fit requires N_ref > 0");
    if (!(v_sat > 0.0)) throw DomainError("mobility fit requires v_sat > 0");
    if (!(beta_fit > 0.0)) throw DomainError("mobility fit requires beta_fit > 0");
}

void TrapParams::validate(double eps_v, double eps_c) const {
    if (!(N_t >= 0.0)) throw DomainError("trap density must be >= 0");
    if (!(sigma_n > 0.0) || !(sigma_p > 0.0)) throw DomainError("capture cross-sections must be > 0");
    if (!(eps_t0 > eps_v) || !(eps_t0 < eps_c))
        throw DomainError("trap level eps_t0 must lie inside the gap");
    if (!(fwhm > 0.0) || !(D_depth >= fwhm)) throw DomainError("trap profile requires D_depth >= fwhm > 0");
}

void SpinCenterParams::validate() const {
    if (!(mu_z > 0.0)) throw DomainError("spin center mu_z must be > 0");
    if (!(g_eff > 0.0)) throw DomainError("spin center g_eff must be > 0");
    if (!(theta >= 0.0) || !(theta <= kPi)) throw DomainError("theta must be in [0, pi]");
    if (!(dipole_var >= 0.0)) throw DomainError("dipole variance must be >= 0");
    if (tau_e && !(*tau_e > 0.0)) throw DomainError("tau_e must be > 0 when given");
}

void MaterialParams::validate() const {
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (!(E_g > 0.0)) throw DomainError("band gap must be > 0");
    if (std::abs((eps_c - eps_v) - E_g) > 1e-9)
        throw DomainError("band edges must satisfy E_g = eps_c - eps_v");
    if (!(eps_v < eps_a) || !(eps_a < eps_d) || !(eps_d < eps_c))
        throw DomainError("dopant levels must satisfy eps_v < eps_a < eps_d < eps_c");
    if (!(m_c > 0.0) || !(m_v > 0.0) || !(m_star > 0.0)) throw DomainError("effective masses must be > 0");
    if (!(E_BD > 0.0)) throw DomainError("breakdown field must be > 0");
    if (!(lattice_const > 0.0)) throw DomainError("lattice constant must be > 0");
    if (!(eps0_F_per_m > 0.0)) throw DomainError("vacuum permittivity must be > 0");
    mobility.validate();
    trap.validate(eps_v, eps_c);
}

double effective_dos(double T, double m_rel) {
    if (!(T > 0.0)) throw DomainError("effective_dos: temperature must be > 0, got " + std::to_string(T));
    if (!(m_rel > 0.0)) throw DomainError("effective_dos: mass must be > 0, got " + std::to_string(m_rel));
    namespace c = constants;
    const double m = m_rel * c::m_e0;
    const double x = 2.0 * m * c::k_B * T / (kPi * c::hbar * c::hbar);  // [1/m^2]
    return 0.25 * x * std::sqrt(x) * c::per_m3_to_cm3;
}

double intrinsic_carrier_density(double T, double E_g_eV, double m_c_rel, double m_v_rel, bool* underflow) {
    if (!(T > 0.0)) throw DomainError("intrinsic_carrier_density: temperature must be > 0");
    if (!(E_g_eV >= 0.0)) throw DomainError("intrinsic_carrier_density: band gap must be >= 0");
    if (underflow) *underflow = false;
    const double Nc = effective_dos(T, m_c_rel);
    const double Pv = effective_dos(T, m_v_rel);
    // Log-domain combination keeps the result finite for very wide gaps.
    const double log_ni = 0.5 * (std::log(Nc) + std::log(Pv)) -
                          E_g_eV * constants::eV_to_J / (2.0 * constants::k_B * T);
    if (log_ni < -700.0) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    return std::exp(log_ni);
}

double intrinsic_fermi_energy(double T, const MaterialParams& material) {
    if (!(T > 0.0)) throw DomainError("intrinsic_fermi_energy: temperature must be > 0");
    const double kT_eV = constants::k_B * T / constants::eV_to_J;
    // ln(Pv/Nc) = (3/2) ln(m_v/m_c); avoids forming the large DOS values.
    const double log_ratio = 1.5 * std::log(material.m_v / material.m_c);
    return 0.5 * (material.eps_c + material.eps_v) + 0.5 * kT_eV * log_ratio;
}

}  // namespace diodeopt
