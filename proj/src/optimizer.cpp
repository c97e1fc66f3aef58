#include "diodeopt/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "diodeopt/errors.hpp"

namespace diodeopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<std::uint8_t> all_active(int n) { return std::vector<std::uint8_t>(n, 1); }

// Run fn(i) for i in [0, n) on up to `threads` workers; exceptions from any
// worker are rethrown on the caller.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Eigen::VectorXd fd_constraint_gradient(const Constraint& c, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& D, double fd_rel,
                                       const std::vector<std::uint8_t>& active) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(q.size());
    const double h0 = c.fn(q);
    for (int i = 0; i < q.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        const double step = fd_rel * D[i];
        Eigen::VectorXd probe = q;
        probe[i] += step;
        g[i] = (c.fn(probe) - h0) / step;
    }
    return g;
}

}  // namespace

void ParameterVector::validate() const {
    if (values.size() == 0) throw DomainError("parameter vector is empty");
    if (names.size() != static_cast<size_t>(values.size()) ||
        active.size() != static_cast<size_t>(values.size()))
        throw DomainError("parameter vector names/values/mask sizes disagree");
    for (int i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw DomainError("parameter '" + names[i] + "' is not finite");
}

void OptimizerConfig::validate() const {
    if (!(s_min > 0.0) || !(s_max > s_min)) throw DomainError("need 0 < s_min < s_max");
    if (!(gamma_proj > 0.0) || !(gamma_proj < 1.0)) throw DomainError("gamma_proj must be in (0,1)");
    if (!(chi > 0.0)) throw DomainError("chi must be > 0");
    if (n_conv < 1 || k_window < 1 || l_avg < 1 || n_max_proj < 1 || max_iter < 1)
        throw DomainError("optimizer window/iteration settings must be >= 1");
    if (!(fd_rel > 0.0)) throw DomainError("fd_rel must be > 0");
    if (!(rate_up > 1.0) || !(rate_down > 0.0) || !(rate_down < 1.0))
        throw DomainError("need rate_up > 1 and rate_down in (0,1)");
    if (!(merit_M > 0.0) || !(merit_alpha > 0.0)) throw DomainError("merit constants must be > 0");
}

const char* OptimizationTrace::reason_name(Termination t) {
    switch (t) {
        case Termination::fractional_change: return "fractional_change";
        case Termination::oscillation: return "oscillation";
        case Termination::iteration_cap: return "iteration_cap";
    }
    return "unknown";
}

GradientResult finite_diff_gradient(const ObjectiveFn& objective, const Eigen::VectorXd& p,
                                    const OptimizerConfig& config,
                                    const std::deque<Eigen::VectorXd>& history,
                                    const std::vector<std::uint8_t>& active,
                                    std::optional<double> f_p) {
    const int n = static_cast<int>(p.size());
    const std::vector<std::uint8_t> mask = active.empty() ? all_active(n) : active;
    if (config.D_scales.size() != n) throw DomainError("finite_diff_gradient: D_scales unset");

    const double f0 = f_p ? *f_p : objective(p).value;
    GradientResult out;
    out.g = Eigen::VectorXd::Zero(n);
    out.averaged.assign(n, 0);

    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
        if (mask[i]) idx.push_back(i);

    std::vector<double> diffs(idx.size(), 0.0), steps(idx.size(), 0.0);
    std::vector<std::uint8_t> failed(idx.size(), 0);
    parallel_for(static_cast<int>(idx.size()), config.threads, [&](int k) {
        const int i = idx[k];
        const double step = config.fd_rel * config.D_scales[i];
        Eigen::VectorXd probe = p;
        probe[i] += step;
        try {
            diffs[k] = objective(probe).value - f0;
            steps[k] = step;
        } catch (const std::exception&) {
            failed[k] = 1;
        }
    });
    // One retry with a halved step for probes that failed.
    for (size_t k = 0; k < idx.size(); ++k) {
        if (!failed[k]) continue;
        const int i = idx[k];
        const double step = 0.5 * config.fd_rel * config.D_scales[i];
        Eigen::VectorXd probe = p;
        probe[i] += step;
        diffs[k] = objective(probe).value - f0;  // surfaces the failure if it persists
        steps[k] = step;
    }

    const double floor = 16.0 * kEps * std::abs(f0);
    for (size_t k = 0; k < idx.size(); ++k) {
        const int i = idx[k];
        if (std::abs(diffs[k]) > floor) {
            out.g[i] = diffs[k] / steps[k];
        } else {
            double mean = 0.0;
            for (const auto& gh : history) mean += gh[i];
            if (!history.empty()) mean /= static_cast<double>(history.size());
            out.g[i] = mean;
            out.averaged[i] = 1;
        }
    }
    return out;
}

Eigen::VectorXd scaled_step(const Eigen::VectorXd& p, const Eigen::VectorXd& gradient,
                            const Eigen::VectorXd& D, double s_k, double alpha_scale) {
    if (!(s_k > 0.0)) throw DomainError("scaled_step: learning rate must be > 0");
    if (!(alpha_scale > 0.0)) throw DomainError("scaled_step: objective scale must be > 0");
    return p - (s_k / alpha_scale) * D.array().square().matrix().cwiseProduct(gradient);
}

double worst_violation(const Eigen::VectorXd& p, const ConstraintSet& constraints) {
    double worst = 0.0;
    for (const auto& c : constraints.constraints) {
        const double h = c.fn(p);
        if (h < 0.0) worst = std::max(worst, -h / c.beta);
    }
    return worst;
}

double merit_value(double objective_value, const Eigen::VectorXd& p,
                   const ConstraintSet& constraints, const OptimizerConfig& config) {
    return objective_value +
           config.merit_alpha * config.merit_M * worst_violation(p, constraints);
}

ProjectionResult project_feasible(const Eigen::VectorXd& q, const ConstraintSet& constraints,
                                  const Eigen::VectorXd& D, const OptimizerConfig& config,
                                  const std::vector<std::uint8_t>& active) {
    ProjectionResult out;
    out.q = q;
    const std::vector<std::uint8_t> mask =
        active.empty() ? all_active(static_cast<int>(q.size())) : active;

    // Finite-difference constraint gradients are frozen for the duration of
    // one projection call; the constraint values themselves stay fresh. Saves
    // a full probe sweep per pass for solver-backed constraints.
    std::vector<Eigen::VectorXd> frozen(constraints.constraints.size());

    for (int pass = 0; pass < config.n_max_proj; ++pass) {
        out.iterations = pass;
        out.violation = worst_violation(out.q, constraints);
        if (out.violation <= config.proj_tol) {
            out.feasible = true;
            return out;
        }
        for (size_t j = 0; j < constraints.constraints.size(); ++j) {
            const auto& c = constraints.constraints[j];
            const double h = c.fn(out.q);
            if (h >= 0.0) continue;
            Eigen::VectorXd g;
            if (c.grad) {
                g = c.grad(out.q);
            } else {
                if (frozen[j].size() == 0)
                    frozen[j] = fd_constraint_gradient(c, out.q, D, config.fd_rel, mask);
                g = frozen[j];
            }
            for (int i = 0; i < g.size(); ++i)
                if (!mask[i]) g[i] = 0.0;
            const double dn2 = (D.cwiseProduct(g)).squaredNorm();
            if (!(dn2 > 0.0))
                throw InfeasibleError("projection: constraint '" + c.label +
                                      "' has zero scaled gradient at a violated point");
            out.q -= config.gamma_proj * (h / dn2) * D.array().square().matrix().cwiseProduct(g);
        }
    }
    out.violation = worst_violation(out.q, constraints);
    out.feasible = out.violation <= config.proj_tol;
    return out;
}

OptimizationTrace optimize(const ObjectiveFn& objective, const ParameterVector& p0,
                           const ConstraintSet& constraints, const OptimizerConfig& config_in) {
    p0.validate();
    OptimizerConfig config = config_in;
    config.validate();
    const int n = p0.size();
    if (config.D_scales.size() == 0) {
        config.D_scales = Eigen::VectorXd::Ones(n);
        for (int i = 0; i < n; ++i) config.D_scales[i] = std::max(std::abs(p0.values[i]), 1.0);
    }
    if (config.D_scales.size() != n)
        throw DomainError("optimize: D_scales size does not match the parameter vector");
    const Eigen::VectorXd D = config.D_scales;
    const std::vector<std::uint8_t>& active = p0.active;

    OptimizationTrace trace;
    Eigen::VectorXd p = p0.values;

    // Feasible start, projecting if needed.
    if (worst_violation(p, constraints) > config.proj_tol) {
        ProjectionResult pr = project_feasible(p, constraints, D, config, active);
        if (!pr.feasible)
            throw InfeasibleError("optimize: initial point infeasible after " +
                                  std::to_string(config.n_max_proj) + " projection passes");
        for (int i = 0; i < n; ++i)
            if (!active[i]) pr.q[i] = p0.values[i];
        p = pr.q;
    }

    ObjectiveSample f_p;
    try {
        f_p = objective(p);
    } catch (const std::exception& e) {
        throw OptimizeError(std::string("optimize: objective failed at the start: ") + e.what(),
                            trace);
    }
    const double alpha_scale = std::max(std::abs(f_p.value), 1e-300);
    trace.f_initial = f_p.value;

    double m_p = merit_value(f_p.value, p, constraints, config);
    std::deque<double> merit_hist{m_p};
    std::deque<Eigen::VectorXd> grad_hist;
    double s = config.s_min;
    double f_best = f_p.value;
    int conv_count = 0;
    std::deque<double> f_window{f_p.value};
    int escalate_streak = 0;
    double prev_candidate_f = f_p.value;
    double prev_candidate_viol = 0.0;
    int consecutive_failures = 0;

    GradientResult grad;
    auto refresh_gradient = [&]() {
        grad = finite_diff_gradient(objective, p, config, grad_hist, active, f_p.value);
        grad_hist.push_back(grad.g);
        while (grad_hist.size() > static_cast<size_t>(config.l_avg)) grad_hist.pop_front();
    };
    try {
        refresh_gradient();
    } catch (const std::exception& e) {
        throw OptimizeError(std::string("optimize: gradient failed at the start: ") + e.what(),
                            trace);
    }

    auto gradient_label = [&]() {
        int averaged = 0, total = 0;
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            ++total;
            averaged += grad.averaged[i] ? 1 : 0;
        }
        if (averaged == 0) return std::string("fresh");
        return "averaged:" + std::to_string(averaged) + "/" + std::to_string(total);
    };

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        Eigen::VectorXd q = scaled_step(p, grad.g, D, s, alpha_scale);
        for (int i = 0; i < n; ++i)
            if (!active[i]) q[i] = p[i];

        IterationRecord rec;
        rec.iteration = iter;
        rec.learning_rate = s;
        rec.gradient_source = gradient_label();

        ProjectionResult pr = project_feasible(q, constraints, D, config, active);
        for (int i = 0; i < n; ++i)
            if (!active[i]) pr.q[i] = p[i];
        rec.worst_violation = pr.violation;
        rec.p = pr.q;

        if (!pr.feasible) {
            // Unprojectable proposal: shrink the step and try again.
            rec.objective = std::numeric_limits<double>::quiet_NaN();
            rec.merit = std::numeric_limits<double>::quiet_NaN();
            rec.accepted = false;
            trace.records.push_back(std::move(rec));
            s = std::max(s * config.rate_down, config.s_min);
            conv_count = 0;
            continue;
        }

        ObjectiveSample f_q;
        try {
            f_q = objective(pr.q);
            consecutive_failures = 0;
        } catch (const std::exception& e) {
            if (++consecutive_failures > 20)
                throw OptimizeError(std::string("optimize: objective keeps failing: ") + e.what(),
                                    trace);
            rec.objective = std::numeric_limits<double>::quiet_NaN();
            rec.merit = std::numeric_limits<double>::quiet_NaN();
            rec.accepted = false;
            trace.records.push_back(std::move(rec));
            s = std::max(s * config.rate_down, config.s_min);
            conv_count = 0;
            continue;
        }

        const double m_q = merit_value(f_q.value, pr.q, constraints, config);
        rec.objective = f_q.value;
        rec.merit = m_q;
        rec.z_opt = f_q.aux;

        // Escalate M when the objective improves while violations grow.
        if (f_q.value < prev_candidate_f && pr.violation > prev_candidate_viol + config.proj_tol) {
            if (++escalate_streak >= 10) {
                config.merit_M *= 2.0;
                escalate_streak = 0;
            }
        } else {
            escalate_streak = 0;
        }
        prev_candidate_f = f_q.value;
        prev_candidate_viol = pr.violation;

        const double merit_avg =
            std::accumulate(merit_hist.begin(), merit_hist.end(), 0.0) /
            static_cast<double>(merit_hist.size());

        // Convergence bookkeeping uses the proposed candidate each iteration.
        const double denom = std::max(std::abs(f_p.value), 1e-300);
        if (std::abs(f_q.value - f_p.value) / denom < config.chi)
            ++conv_count;
        else
            conv_count = 0;
        f_window.push_back(f_q.value);
        while (f_window.size() > static_cast<size_t>(config.n_conv)) f_window.pop_front();

        if (m_q < merit_avg) {
            rec.accepted = true;
            trace.records.push_back(rec);
            ++trace.accepted_count;
            p = pr.q;
            f_p = f_q;
            m_p = m_q;
            merit_hist.push_back(m_q);
            while (merit_hist.size() > static_cast<size_t>(config.k_window)) merit_hist.pop_front();
            f_best = std::min(f_best, f_q.value);
            s = std::min(s * config.rate_up, config.s_max);
            try {
                refresh_gradient();
            } catch (const std::exception& e) {
                throw OptimizeError(std::string("optimize: gradient evaluation failed: ") + e.what(),
                                    trace);
            }
        } else {
            rec.accepted = false;
            trace.records.push_back(rec);
            s = std::max(s * config.rate_down, config.s_min);
        }

        if (conv_count >= config.n_conv) {
            trace.reason = Termination::fractional_change;
            break;
        }
        if (f_window.size() == static_cast<size_t>(config.n_conv)) {
            const double fb = std::max(std::abs(f_best), 1e-300);
            bool oscillating = true;
            for (double fv : f_window)
                if (std::abs(fv - f_best) / fb >= config.chi) {
                    oscillating = false;
                    break;
                }
            if (oscillating) {
                trace.reason = Termination::oscillation;
                break;
            }
        }
    }

    trace.p_final = p;
    trace.f_final = f_p.value;
    trace.z_opt_final = f_p.aux;
    trace.merit_M_final = config.merit_M;
    return trace;
}

// --- Diode-specific pieces ---------------------------------------------------

struct DiodeProblem::Cache {
    std::mutex mutex;
    std::map<std::array<double, 8>, std::shared_ptr<const PotentialSolution>> map;
};

DiodeProblem::DiodeProblem(DiodeDesign base, MaterialParams material, SpinCenterParams spin,
                           GridConfig grid, std::vector<std::string> names)
    : base_(base),
      material_(material),
      spin_(spin),
      grid_(grid),
      names_(std::move(names)),
      cache_(std::make_shared<Cache>()) {
    material_.validate();
    base_.validate();
    grid_.validate();
}

DiodeDesign DiodeProblem::design_from(const Eigen::VectorXd& p) const {
    DiodeDesign d = base_;
    for (size_t i = 0; i < names_.size(); ++i) {
        const double v = p[static_cast<int>(i)];
        const std::string& name = names_[i];
        if (name == "N_a") d.N_a = v;
        else if (name == "N_n") d.N_n = v;
        else if (name == "N_d") d.N_d = v;
        else if (name == "d_l") d.d_l = v;
        else if (name == "d") d.d = v;
        else if (name == "d_r") d.d_r = v;
        else if (name == "V") d.V = v;
        else throw DomainError("unknown design parameter '" + name + "'");
    }
    return d;
}

std::shared_ptr<const PotentialSolution> DiodeProblem::solve(const Eigen::VectorXd& p) const {
    const DiodeDesign d = design_from(p);
    const std::array<double, 8> key{d.N_a, d.N_n, d.N_d, d.d_l, d.d, d.d_r, d.V, d.T};
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->map.find(key);
        if (it != cache_->map.end()) return it->second;
    }
    auto sol = std::make_shared<const PotentialSolution>(solve_poisson(d, material_, grid_));
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        if (cache_->map.size() > 64) cache_->map.clear();
        cache_->map[key] = sol;
    }
    return sol;
}

ObjectiveSample DiodeProblem::objective(const Eigen::VectorXd& p) const {
    const DiodeDesign d = design_from(p);
    auto sol = solve(p);
    const DepletionProfile dep = depletion_profile(*sol, d, material_);
    const DefectOptimum opt = optimal_defect_position(d, dep, material_, spin_);
    return ObjectiveSample{opt.gamma_opt, opt.z_opt};
}

double DiodeProblem::max_abs_field(const Eigen::VectorXd& p) const {
    return solve(p)->E_field.cwiseAbs().maxCoeff();
}

ConstraintSet diode_constraints(const DesignBounds& bounds, const MaterialParams& material,
                                std::shared_ptr<const DiodeProblem> problem,
                                const ParameterVector& p0) {
    ConstraintSet set;
    auto bound_low = [&](int i, double lo, const std::string& label) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p0.size());
        e[i] = 1.0;
        set.constraints.push_back(Constraint{
            label, std::abs(lo),
            [i, lo](const Eigen::VectorXd& p) { return p[i] - lo; },
            [e](const Eigen::VectorXd&) { return e; }});
    };
    auto bound_high = [&](int i, double hi, const std::string& label) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p0.size());
        e[i] = -1.0;
        set.constraints.push_back(Constraint{
            label, std::abs(hi),
            [i, hi](const Eigen::VectorXd& p) { return hi - p[i]; },
            [e](const Eigen::VectorXd&) { return e; }});
    };

    bool any_field_parameter = false;
    for (int i = 0; i < p0.size(); ++i) {
        if (!p0.active[i]) continue;  // inactive bounds are unrepairable, skip them
        const std::string& name = p0.names[i];
        if (name == "N_n") {
            bound_low(i, bounds.N_n_min, "N_n_min");
            bound_high(i, bounds.N_cap, "N_n_cap");
        } else if (name == "N_a" || name == "N_d") {
            bound_low(i, bounds.N_ad_min, name + "_min");
            bound_high(i, bounds.N_cap, name + "_cap");
        } else if (name == "d_l" || name == "d" || name == "d_r") {
            bound_low(i, bounds.length_min, name + "_min");
        }
        any_field_parameter = true;
    }
    if (bounds.include_breakdown && any_field_parameter && problem) {
        const double limit = bounds.omega_bd * material.E_BD;
        set.constraints.push_back(Constraint{
            "breakdown", limit,
            [problem, limit](const Eigen::VectorXd& p) {
                return limit - problem->max_abs_field(p);
            },
            nullptr});
    }
    return set;
}

ObjectiveFn diode_objective(std::shared_ptr<const DiodeProblem> problem) {
    return [problem](const Eigen::VectorXd& p) { return problem->objective(p); };
}

}  // namespace diodeopt
