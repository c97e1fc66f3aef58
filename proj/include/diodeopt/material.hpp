#pragma once

#include <optional>

#include "diodeopt/constants.hpp"

namespace diodeopt {

// Caughey-Thomas style low-field mobility fit plus velocity saturation.
struct MobilityFit {
    double mu_min = 40.0;    // [cm^2/Vs]
    double mu_max = 950.0;   // [cm^2/Vs]
    double N_ref = 2e17;     // reference doping [cm^-3]
    double alpha_fit = 0.76;
    double v_sat = 2.4e7;    // saturation velocity [cm/s]
    double beta_fit = 0.85;  // linear-to-saturated transition abruptness

    void validate() const;
};

// Deep-level trap population near the diode surface. The default level sits
// 0.65 eV below the conduction band (Z1/2-like); with the Poole-Frenkel shift
// the hole emission stays rate-limiting, which keeps the leakage current
// monotone in reverse bias.
struct TrapParams {
    double N_t = 1e17;       // trap density [cm^-3]
    double sigma_n = 1e-15;  // electron capture cross-section [cm^2]
    double sigma_p = 1e-15;  // hole capture cross-section [cm^2]
    double eps_t0 = 2.61;    // zero-field trap level [eV], same band reference as eps_c/eps_v
    double D_depth = 5.0;    // trap layer depth from the surface [nm]
    double fwhm = 5.0;       // half-Gaussian FWHM of the depth profile [nm]

    void validate(double eps_v, double eps_c) const;
};

// Embedded spin center. mu_z is the Stark susceptibility of the optical
// transition, expressed directly in Hz per (V/cm) so that linewidths follow
// from field standard deviations without touching hbar-vs-h conventions.
// The default is calibrated once against the reference diode at -5 V bias
// with the defect at 0.85 um (11.1 MHz); see the shipped config notes.
struct SpinCenterParams {
    double mu_z = 9.573464e5;   // [Hz/(V/cm)], calibrated default
    double g_eff = 2.0;         // effective g-factor
    double z_def = 0.85;        // position along growth axis [um]
    double x_def = 100.0;       // depth from the diode surface [nm]
    double theta = 0.9553166181245093;  // dipole angle wrt z; default has cos(2*theta) = -1/3 (spherical average)
    double dipole_var = 0.01;   // surface-dipole variance p_d^2 [(e nm)^2]
    std::optional<double> tau_e;  // carrier scattering time [s]; defaulted from mobility when unset

    void validate() const;
};

struct MaterialParams {
    double kappa = 9.66;    // relative permittivity
    double E_g = 3.26;      // band gap [eV]
    double eps_c = 3.26;    // conduction band edge [eV]
    double eps_v = 0.0;     // valence band edge [eV]
    double eps_a = 0.20;    // acceptor level [eV]
    double eps_d = 3.20;    // donor level [eV]
    double m_c = 0.37;      // conduction DOS mass [m0]
    double m_v = 1.00;      // valence DOS mass [m0]
    double m_star = 0.37;   // tunneling effective mass [m0]
    double E_BD = 1.9e6;    // breakdown field [V/cm]
    double lattice_const = 0.1;  // lattice constant delta [nm]
    // Vacuum permittivity used to build the material permittivity. Defaults to
    // CODATA; constants::eps0_legacy reproduces the legacy printed value.
    double eps0_F_per_m = constants::eps0;
    MobilityFit mobility{};
    TrapParams trap{};

    double permittivity() const { return kappa * eps0_F_per_m; }  // [F/m]

    void validate() const;

    // 4H-SiC with aluminum acceptors and nitrogen donors.
    static MaterialParams sic_4h() { return MaterialParams{}; }
};

// Effective density of states (1/4)(2 m kB T / (pi hbar^2))^{3/2} in cm^-3.
// m_rel is in units of the electron mass.
double effective_dos(double T, double m_rel);

// n_i = sqrt(Nc Pv) exp(-Eg / 2 kB T) in cm^-3. Underflow of the exponential
// returns 0 and sets *underflow when provided.
double intrinsic_carrier_density(double T, double E_g_eV, double m_c_rel, double m_v_rel,
                                 bool* underflow = nullptr);

// eps_i = (eps_c + eps_v)/2 + (kB T / 2) ln(Pv/Nc) in eV.
double intrinsic_fermi_energy(double T, const MaterialParams& material);

}  // namespace diodeopt
