#pragma once

#include "diodeopt/poisson.hpp"

namespace diodeopt {

// |dE| pieces in V/cm. Exactly one of n_depleted/n_bulk applies to a given
// defect position; the inactive branch is NaN.
struct DeltaEComponents {
    double n_plus = 0.0;
    double p = 0.0;
    double n_depleted = 0.0;
    double n_bulk = 0.0;
    bool depleted_branch = true;
};

struct DeltaEResult {
    double total = 0.0;  // [V/cm]
    DeltaEComponents components;
};

struct DefectOptimum {
    double z_opt = 0.0;     // [um]
    double gamma_opt = 0.0; // [MHz]
};

struct LinewidthReport {
    double gamma_majority = 0.0;  // [MHz]
    DeltaEComponents components;
    double z_def = 0.0;  // [um]
    double z_opt = 0.0;  // [um]
    double gamma_opt = 0.0;
};

enum class Lineshape { gaussian, lorentzian };

// Fluctuating-dipole field noise seen by a defect at z_def in (0, d).
DeltaEResult delta_E_total(const DiodeDesign& design, const DepletionProfile& depletion,
                           double z_def_um, const MaterialParams& material);

// Gamma = sqrt(2 ln2 / pi) * mu_z * |dE|/sqrt(3), reported in MHz.
double linewidth_majority(double delta_E_V_per_cm, const SpinCenterParams& spin);

// Minimum of Gamma(z_def) over (0, d) for an already-solved depletion profile:
// 512-point scan plus golden-section refinement.
DefectOptimum optimal_defect_position(const DiodeDesign& design, const DepletionProfile& depletion,
                                      const MaterialParams& material, const SpinCenterParams& spin);

// Convenience overload that runs the Poisson solve first.
DefectOptimum optimal_defect_position(const DiodeDesign& design, const MaterialParams& material,
                                      const SpinCenterParams& spin, const GridConfig& grid = {});

// Normalized spectral line shapes; omega and width_param in rad/s, result in s.
double lineshape_eval(double omega, Lineshape kind, double width_param);

}  // namespace diodeopt
