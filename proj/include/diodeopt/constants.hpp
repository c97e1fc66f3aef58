#pragma once

namespace diodeopt::constants {

// CODATA 2018 values, SI units.
inline constexpr double q_e     = 1.602176634e-19;   // elementary charge [C]
inline constexpr double k_B     = 1.380649e-23;      // Boltzmann constant [J/K]
inline constexpr double h       = 6.62607015e-34;    // Planck constant [J s]
inline constexpr double hbar    = 1.054571817e-34;   // reduced Planck constant [J s]
inline constexpr double m_e0    = 9.1093837015e-31;  // electron rest mass [kg]
inline constexpr double eps0    = 8.8541878128e-12;  // vacuum permittivity [F/m]
inline constexpr double mu0_mag = 1.25663706212e-6;  // vacuum permeability [N/A^2]
inline constexpr double mu_B    = 9.2740100783e-24;  // Bohr magneton [J/T]

// Printed in the source literature for this device family; kept selectable
// next to the CODATA value (see MaterialParams::eps0_F_per_m).
inline constexpr double eps0_legacy = 8.99e-12;  // [F/m]

// Unit conversions. Internal computation is SI; configuration and reports use
// cm^-3, um, nm, V/cm and MHz, converted explicitly at the boundaries.
inline constexpr double eV_to_J      = q_e;       // 1 eV in J
inline constexpr double per_cm3_to_SI = 1e6;      // cm^-3 -> m^-3
inline constexpr double per_m3_to_cm3 = 1e-6;     // m^-3 -> cm^-3
inline constexpr double um_to_m      = 1e-6;
inline constexpr double m_to_um      = 1e6;
inline constexpr double nm_to_m      = 1e-9;
inline constexpr double V_per_m_to_V_per_cm = 1e-2;
inline constexpr double V_per_cm_to_V_per_m = 1e2;
inline constexpr double cm_per_s_to_m_per_s = 1e-2;
inline constexpr double m_per_s_to_cm_per_s = 1e2;

}  // namespace diodeopt::constants
