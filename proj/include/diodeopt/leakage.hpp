#pragma once

#include <Eigen/Core>

#include "diodeopt/poisson.hpp"

namespace diodeopt {

struct EmissionRates {
    double e_n = 0.0;  // [1/s]
    double e_p = 0.0;  // [1/s]
    bool clamped = false;  // PF shift pushed the trap level to a band edge
};

// Half-Gaussian trap-carrier depth profile, normalized so that the integral
// of n_V over [0, D] equals n_eff * D.
struct TrapDensityProfile {
    Eigen::VectorXd x;    // depth from the surface [nm]
    Eigen::VectorXd n_V;  // [cm^-3]
    double n_eff = 0.0;   // [cm^-3]
};

struct LeakageResult {
    double J_tat = 0.0;            // [A/cm^2]
    double n_eff = 0.0;            // [cm^-3]
    TrapDensityProfile profile;
    double gamma_E_surface = 0.0;  // [MHz] at spin.x_def
    double gamma_B_surface = 0.0;  // [MHz] at spin.x_def
};

// Hurkx tunneling enhancement factor for the thermal emission rate.
// E in V/cm; returns 0 at E = 0. Evaluated in log domain internally.
double field_enhancement_factor(double E_V_per_cm, double T, const MaterialParams& material);

// ln of the enhancement factor (-inf at E = 0); useful where the factor itself
// would overflow.
double log_field_enhancement(double E_V_per_cm, double T, const MaterialParams& material);

// Field-enhanced electron/hole emission rates with the Poole-Frenkel shift of
// the trap level.
EmissionRates emission_rates(double E_V_per_cm, double T, const MaterialParams& material);

// Occupied-trap density: closed-form transient and steady state.
double trap_occupation(double e_n, double e_p, double N_t, double n_t0, double t);
double trap_occupation_steady(double e_n, double e_p, double N_t);

// G_TAT(z) = N_t e_n e_p / (e_n + e_p) using the local field. [cm^-3 s^-1]
double generation_rate(double z_um, const PotentialSolution& solution,
                       const MaterialParams& material, double T);

// J_TAT = q * integral of G over the depletion span. [A/cm^2]
double leakage_current(const DiodeDesign& design, const PotentialSolution& solution,
                       const MaterialParams& material);

// Field-dependent drift velocity with doping-dependent low-field mobility.
// E in V/cm, doping in cm^-3, result cm/s.
double drift_velocity(double E_V_per_cm, double total_doping_cm3, const MaterialParams& material);

// Average carrier density sustaining the leakage current, plus its surface
// depth profile.
TrapDensityProfile effective_density(const DiodeDesign& design, const PotentialSolution& solution,
                                     const MaterialParams& material);

// Linewidth from surface charge noise at defect depth x_def (nm, beyond the
// trap layer). [MHz]
double surface_electric_linewidth(const TrapDensityProfile& profile, double x_def_nm,
                                  const SpinCenterParams& spin, const MaterialParams& material);

// Linewidth from Johnson-Nyquist magnetic noise of the same carriers. [MHz]
// spin.tau_e must be resolved (the leakage pipeline defaults it from mobility).
double surface_magnetic_linewidth(const TrapDensityProfile& profile, double x_def_nm,
                                  const SpinCenterParams& spin, const MaterialParams& material,
                                  double T);

// Full pipeline at the design bias: solve, integrate, evaluate both surface
// linewidths at spin.x_def.
LeakageResult leakage_report(const DiodeDesign& design, const MaterialParams& material,
                             const SpinCenterParams& spin, const GridConfig& grid = {});

}  // namespace diodeopt
