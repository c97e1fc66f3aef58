#pragma once

#include <Eigen/Core>

#include "diodeopt/material.hpp"

namespace diodeopt {

// The optimizable device: p (-d_l..0), lightly doped n (0..d), n+ (d..d+d_r).
struct DiodeDesign {
    double N_a = 7e18;    // acceptor density [cm^-3]
    double N_n = 4e15;    // light donor density [cm^-3]
    double N_d = 1.01e19; // donor density [cm^-3]
    double d_l = 0.4;     // p layer length [um]
    double d = 10.0;      // n layer length [um]
    double d_r = 0.4;     // n+ layer length [um]
    double V = 0.0;       // bias voltage [V], negative for reverse bias
    double T = 300.0;     // temperature [K]

    double z_left() const { return -d_l; }          // [um]
    double z_right() const { return d + d_r; }      // [um]
    double total_length() const { return d_l + d + d_r; }

    void validate() const;

    static DiodeDesign baseline(double bias = 0.0) {
        DiodeDesign dd;
        dd.V = bias;
        return dd;
    }
};

struct GridConfig {
    int n_points = 2001;       // uniform nodes over [-d_l, d+d_r]
    double newton_tol = 1e-10; // scaled residual / relative update tolerance
    int newton_max_iter = 200;
    double damping = 1.0;      // initial Newton damping factor in (0, 1]

    double spacing(const DiodeDesign& design) const {  // [um]
        return design.total_length() / static_cast<double>(n_points - 1);
    }
    void validate() const;
};

// Quasi-Fermi level at the left contact and built-in potential at the right.
struct BoundaryLevels {
    double mu_l = 0.0;     // [eV]
    double phi_inf = 0.0;  // [V]
};

struct PotentialSolution {
    Eigen::VectorXd z;        // node positions [um]
    Eigen::VectorXd psi;      // dimensionless potential
    Eigen::VectorXd phi;      // electrostatic potential [V]
    Eigen::VectorXd E_field;  // -dphi/dz [V/cm]
    Eigen::VectorXd rho_c;    // free-carrier charge density [C/cm^3]
    Eigen::VectorXd n_e;      // electrons [cm^-3]
    Eigen::VectorXd p_h;      // holes [cm^-3]
    double mu_l = 0.0;        // [eV]
    double phi_inf = 0.0;     // [V]
    bool converged = false;
    double residual = 0.0;    // final scaled Newton residual
    int newton_iterations = 0;

    // Linear interpolation on the uniform grid.
    double field_at(double z_um) const;     // [V/cm]
    double carriers_at(double z_um) const;  // n+p [cm^-3]
};

struct DepletionProfile {
    double d_p = 0.0;          // depleted width of the p region [um]
    double dn_tilde = 0.0;     // depleted width of the n region from z=0 [um]
    double d_n_plus = 0.0;     // depleted width of the n+ region [um]
    bool fully_depleted_n = false;
    double d_n_analytic = 0.0; // closed-form depletion width [um]
    double V_c = 0.0;          // full-depletion voltage [V]
};

// a*ln(10)*tanh(x/(a*ln10)): identity for small |x|, saturates at a*ln(10).
double sigmoid_regulator(double x, double a);

// Charge-neutral levels at both contacts; throws SolveError on bracket failure.
BoundaryLevels boundary_levels(const DiodeDesign& design, const MaterialParams& material);

// Regularized rho(z, psi) in C/cm^3; z in [-d_l, d+d_r] um.
double charge_density(double psi, double z_um, const DiodeDesign& design,
                      const MaterialParams& material);

// Damped Newton on the dimensionless Poisson equation with Dirichlet ends,
// with a voltage continuation ladder beyond 100 V of bias.
PotentialSolution solve_poisson(const DiodeDesign& design, const MaterialParams& material,
                                const GridConfig& grid = {});

// Depletion widths from the carrier profile (threshold at 1% of the local
// background doping, log-interpolated between nodes) plus the closed forms.
DepletionProfile depletion_profile(const PotentialSolution& solution, const DiodeDesign& design,
                                   const MaterialParams& material);

}  // namespace diodeopt
