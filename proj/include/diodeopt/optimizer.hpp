#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "diodeopt/linewidth.hpp"
#include "diodeopt/poisson.hpp"

namespace diodeopt {

// Design parameters in canonical units (densities cm^-3, lengths um, volts).
struct ParameterVector {
    std::vector<std::string> names;
    Eigen::VectorXd values;
    std::vector<std::uint8_t> active;  // optimizer may change these entries

    void validate() const;
    int size() const { return static_cast<int>(values.size()); }
};

struct Constraint {
    std::string label;
    double beta = 1.0;  // positive scale of the constraint function
    std::function<double(const Eigen::VectorXd&)> fn;        // feasible iff fn(p) >= 0
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;  // optional; FD when empty
};

struct ConstraintSet {
    std::vector<Constraint> constraints;
};

struct OptimizerConfig {
    double s_min = 5e-5;
    double s_max = 150.0;
    double merit_M = 2.0;
    double merit_alpha = 2.0;
    double gamma_proj = 0.8;
    int n_max_proj = 100;
    double chi = 1e-5;
    int n_conv = 30;
    int k_window = 10;   // merit moving-average length
    int l_avg = 5;       // derivative-history length
    double fd_rel = 1e-3;
    double rate_up = 1.5;
    double rate_down = 0.5;
    Eigen::VectorXd D_scales;  // diagonal scaling; filled from p0 when empty
    int max_iter = 2000;
    int threads = 1;           // concurrent finite-difference probes
    double proj_tol = 1e-10;   // scaled violation treated as zero

    void validate() const;
};

// Objective value plus a free-form auxiliary (the diode objective reports the
// inner-minimization z_opt there).
struct ObjectiveSample {
    double value = 0.0;
    double aux = std::numeric_limits<double>::quiet_NaN();
};
using ObjectiveFn = std::function<ObjectiveSample(const Eigen::VectorXd&)>;

struct IterationRecord {
    int iteration = 0;
    Eigen::VectorXd p;         // candidate parameters (committed when accepted)
    double objective = 0.0;
    double merit = 0.0;
    double learning_rate = 0.0;
    double worst_violation = 0.0;
    double z_opt = std::numeric_limits<double>::quiet_NaN();
    bool accepted = false;
    std::string gradient_source;  // "fresh" or "averaged:k/n"
};

enum class Termination {
    fractional_change,
    oscillation,
    iteration_cap,
};

struct OptimizationTrace {
    std::vector<IterationRecord> records;
    Termination reason = Termination::iteration_cap;
    Eigen::VectorXd p_final;
    double f_initial = 0.0;
    double f_final = 0.0;
    double z_opt_final = std::numeric_limits<double>::quiet_NaN();
    int accepted_count = 0;
    double merit_M_final = 0.0;

    static const char* reason_name(Termination t);
};

// Thrown when the objective keeps failing; carries the partial trace.
class OptimizeError : public std::runtime_error {
  public:
    OptimizeError(const std::string& what, OptimizationTrace trace)
        : std::runtime_error(what), trace(std::move(trace)) {}
    OptimizationTrace trace;
};

struct GradientResult {
    Eigen::VectorXd g;
    std::vector<std::uint8_t> averaged;  // per component: replaced by history mean
};

// Forward differences with step fd_rel * D_ii; unresolvable components fall
// back to the mean of the stored gradient history.
GradientResult finite_diff_gradient(const ObjectiveFn& objective, const Eigen::VectorXd& p,
                                    const OptimizerConfig& config,
                                    const std::deque<Eigen::VectorXd>& history,
                                    const std::vector<std::uint8_t>& active,
                                    std::optional<double> f_p = std::nullopt);

// q = p - s_k * alpha^-1 * D^2 * grad.
Eigen::VectorXd scaled_step(const Eigen::VectorXd& p, const Eigen::VectorXd& gradient,
                            const Eigen::VectorXd& D, double s_k, double alpha_scale);

struct ProjectionResult {
    Eigen::VectorXd q;
    double violation = 0.0;  // residual scaled worst violation
    int iterations = 0;
    bool feasible = false;
};

// Damped first-order projection onto the feasible set, repeated until the
// scaled worst violation vanishes or the iteration cap is reached.
ProjectionResult project_feasible(const Eigen::VectorXd& q, const ConstraintSet& constraints,
                                  const Eigen::VectorXd& D, const OptimizerConfig& config,
                                  const std::vector<std::uint8_t>& active = {});

// Scaled L-infinity norm of the negative constraint parts.
double worst_violation(const Eigen::VectorXd& p, const ConstraintSet& constraints);

// m = f + alpha * M * worst_violation.
double merit_value(double objective_value, const Eigen::VectorXd& p,
                   const ConstraintSet& constraints, const OptimizerConfig& config);

// Scaled gradient descent with projection, non-monotone merit acceptance and
// a self-adjusting learning rate.
OptimizationTrace optimize(const ObjectiveFn& objective, const ParameterVector& p0,
                           const ConstraintSet& constraints, const OptimizerConfig& config);

// --- Diode-specific builders -------------------------------------------------

// Shared, cached evaluation context for the diode objective and the breakdown
// constraint. Thread-safe; solves are memoized on exact parameter bits.
class DiodeProblem {
  public:
    DiodeProblem(DiodeDesign base, MaterialParams material, SpinCenterParams spin, GridConfig grid,
                 std::vector<std::string> names);

    DiodeDesign design_from(const Eigen::VectorXd& p) const;
    ObjectiveSample objective(const Eigen::VectorXd& p) const;  // Gamma [MHz], aux = z_opt [um]
    double max_abs_field(const Eigen::VectorXd& p) const;       // [V/cm]
    std::shared_ptr<const PotentialSolution> solve(const Eigen::VectorXd& p) const;

    const std::vector<std::string>& names() const { return names_; }
    const DiodeDesign& base() const { return base_; }
    const MaterialParams& material() const { return material_; }
    const SpinCenterParams& spin() const { return spin_; }
    const GridConfig& grid() const { return grid_; }

  private:
    DiodeDesign base_;
    MaterialParams material_;
    SpinCenterParams spin_;
    GridConfig grid_;
    std::vector<std::string> names_;
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

struct DesignBounds {
    double N_n_min = 1e14;     // [cm^-3]
    double N_ad_min = 1e17;    // [cm^-3]
    double N_cap = 5e19;       // [cm^-3]
    double length_min = 0.1;   // [um]
    double omega_bd = 0.95;    // breakdown safety margin
    bool include_breakdown = true;
};

// Bound constraints for the active parameters plus the breakdown-field
// constraint evaluated through a fresh Poisson solve.
ConstraintSet diode_constraints(const DesignBounds& bounds, const MaterialParams& material,
                                std::shared_ptr<const DiodeProblem> problem,
                                const ParameterVector& p0);

// Objective per the inner z_def minimization; equals
// optimal_defect_position(...) on identical inputs.
ObjectiveFn diode_objective(std::shared_ptr<const DiodeProblem> problem);

}  // namespace diodeopt
