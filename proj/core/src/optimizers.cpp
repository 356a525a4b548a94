#include "ctrpo/optimizers.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace ctrpo {

using ad::Tape;
using ad::Var;

namespace {

constexpr double kTinyNorm = 1e-12;
constexpr double kMinLambda = 1e-8;

Eigen::VectorXd likelihood_ratios(const MlpSpec& spec, const Eigen::VectorXd& new_params,
                                  const EstimatedBatch& batch) {
    const GaussianPolicy pol(spec, new_params);
    const Eigen::VectorXd logp = pol.log_prob(batch.obs, batch.actions);
    Eigen::VectorXd ratio = (logp - batch.logps).array().exp();
    for (Eigen::Index i = 0; i < ratio.size(); ++i)
        if (!std::isfinite(ratio[i]))
            throw std::runtime_error("non-finite likelihood ratio at batch index " + std::to_string(i));
    return ratio;
}

struct CoreStep {
    Eigen::VectorXd x;  // approximate H^-1 g
    double q = 0.0;     // g.x
    double shs = 0.0;   // x.Hx
    Eigen::VectorXd full_step;
};

std::optional<CoreStep> natural_step(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fvp,
                                     const Eigen::VectorXd& g, const TrustRegionCfg& cfg) {
    if (g.norm() < kTinyNorm) return std::nullopt;
    CoreStep core;
    core.x = conjugate_gradient(fvp, g, cfg.cg_iters, cfg.cg_residual_tol);
    core.q = g.dot(core.x);
    core.shs = core.x.dot(fvp(core.x));
    if (!(core.shs > 0.0) || !std::isfinite(core.shs)) return std::nullopt;
    core.full_step = std::sqrt(2.0 * cfg.delta / core.shs) * core.x;
    return core;
}

using AcceptFn = std::function<bool(const Eigen::VectorXd& trial, double kl, double surrogate)>;

std::pair<Eigen::VectorXd, UpdateReport> backtracking_search(const GaussianPolicy& policy,
                                                             const EstimatedBatch& batch,
                                                             const TrustRegionCfg& cfg,
                                                             const Eigen::VectorXd& full_step,
                                                             UpdateReport report, const AcceptFn& accept,
                                                             bool recovery) {
    const Eigen::VectorXd& old_params = policy.params();
    double scale = 1.0;
    for (int k = 0; k <= cfg.max_backtracks; ++k) {
        const Eigen::VectorXd trial = old_params + scale * full_step;
        const double kl = mean_kl(policy.spec(), old_params, trial, batch.obs);
        const double surr = surrogate_loss(policy.spec(), trial, batch);
        if (std::isfinite(kl) && std::isfinite(surr) && accept(trial, kl, surr)) {
            report.surrogate_after = surr;
            report.kl_after = kl;
            report.step_kind = recovery ? StepKind::Recovery : (k == 0 ? StepKind::Full : StepKind::Backtracked);
            report.backtracks = k;
            report.expected_cost_after_estimate = cost_surrogate(policy.spec(), trial, batch);
            return {trial, report};
        }
        scale *= cfg.backtrack_ratio;
    }
    report.surrogate_after = report.surrogate_before;
    report.kl_after = 0.0;
    report.step_kind = StepKind::Rejected;
    report.backtracks = cfg.max_backtracks + 1;
    report.expected_cost_after_estimate = report.expected_cost_before;
    return {old_params, report};
}

std::pair<Eigen::VectorXd, UpdateReport> rejected_update(const GaussianPolicy& policy, UpdateReport report) {
    report.surrogate_after = report.surrogate_before;
    report.kl_after = 0.0;
    report.step_kind = StepKind::Rejected;
    report.expected_cost_after_estimate = report.expected_cost_before;
    return {policy.params(), report};
}

}  // namespace

void TrustRegionCfg::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (cg_iters < 1) throw std::invalid_argument("cg_iters must be positive");
    if (!(cg_residual_tol > 0.0)) throw std::invalid_argument("cg_residual_tol must be positive");
    if (!(damping >= 0.0)) throw std::invalid_argument("damping must be non-negative");
    if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
        throw std::invalid_argument("backtrack_ratio must lie in (0, 1)");
    if (max_backtracks < 0) throw std::invalid_argument("max_backtracks must be non-negative");
}

void CostConstraintCfg::validate() const {
    if (!(cost_limit >= 0.0)) throw std::invalid_argument("cost_limit must be non-negative");
    if (!(gamma_c > 0.0 && gamma_c <= 1.0)) throw std::invalid_argument("gamma_c must lie in (0, 1]");
}

std::string to_string(StepKind k) {
    switch (k) {
        case StepKind::Full: return "full";
        case StepKind::Backtracked: return "backtracked";
        case StepKind::Recovery: return "recovery";
        case StepKind::Rejected: return "rejected";
    }
    throw std::logic_error("unknown step kind");
}

double surrogate_loss(const MlpSpec& spec, const Eigen::VectorXd& new_params, const EstimatedBatch& batch) {
    const Eigen::VectorXd ratio = likelihood_ratios(spec, new_params, batch);
    return (ratio.array() * batch.advantages.array()).mean();
}

double cost_surrogate(const MlpSpec& spec, const Eigen::VectorXd& new_params, const EstimatedBatch& batch) {
    const Eigen::VectorXd ratio = likelihood_ratios(spec, new_params, batch);
    return batch.mean_discounted_cost + (ratio.array() * batch.cost_advantages.array()).mean() -
           batch.cost_advantages.mean();
}

std::pair<double, Eigen::VectorXd> surrogate_with_grad(const MlpSpec& spec, const Eigen::VectorXd& params,
                                                       const EstimatedBatch& batch,
                                                       const Eigen::VectorXd& advantages) {
    if (advantages.size() != batch.size()) throw std::invalid_argument("advantage column size mismatch");
    const GaussianPolicy pol(spec, params);
    Tape tape;
    const Var theta = tape.leaf(params);
    const Var logp = pol.log_prob_tape(tape, theta, batch.obs, batch.actions);
    const Var ratio = tape.exp(tape.sub(logp, tape.constant(batch.logps.transpose())));
    const Var weighted = tape.mul(ratio, tape.constant(advantages.transpose()));
    const Var loss = tape.scale(tape.sum(weighted), 1.0 / static_cast<double>(batch.size()));
    tape.backward(loss);
    Eigen::VectorXd grad = tape.adjoint(theta);
    if (!grad.allFinite()) throw std::runtime_error("non-finite surrogate gradient");
    return {tape.value(loss)(0, 0), std::move(grad)};
}

Eigen::VectorXd conjugate_gradient(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                   const Eigen::VectorXd& b, int iters, double tol) {
    if (!b.allFinite()) throw std::invalid_argument("non-finite right-hand side");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    const double b_norm = b.norm();
    if (b_norm == 0.0) return x;

    Eigen::VectorXd r = b;
    Eigen::VectorXd p = b;
    double rs = r.squaredNorm();
    for (int k = 0; k < iters; ++k) {
        if (std::sqrt(rs) <= tol * b_norm) break;
        const Eigen::VectorXd ap = apply(p);
        const double pap = p.dot(ap);
        if (!std::isfinite(pap) || pap <= 0.0)
            throw std::runtime_error("conjugate gradient hit non-positive curvature");
        const double alpha = rs / pap;
        x += alpha * p;
        r -= alpha * ap;
        const double rs_next = r.squaredNorm();
        if (!std::isfinite(rs_next)) throw std::runtime_error("non-finite conjugate gradient iterate");
        p = r + (rs_next / rs) * p;
        rs = rs_next;
    }
    return x;
}

CpoDualSolution solve_cpo_dual(double q, double r, double s, double c, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(s > 0.0)) throw std::invalid_argument("solve_cpo_dual needs s > 0");

    CpoDualSolution sol;
    const double big = 2.0 * delta - c * c / s;
    if (big < 0.0) {
        if (c >= 0.0) {
            sol.recovery = true;
            return sol;
        }
        // The cost boundary lies outside the trust region on the feasible
        // side: the constraint cannot become active.
        sol.constraint_inactive = true;
        sol.lambda = std::max(std::sqrt(q / (2.0 * delta)), kMinLambda);
        sol.nu = 0.0;
        return sol;
    }

    const double a_coef = std::max(q - r * r / s, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    const double lam_a_unproj = big > 0.0 ? std::sqrt(a_coef / big) : inf;
    const double lam_b_unproj = std::sqrt(q / (2.0 * delta));

    // Region where the projected cost multiplier (r + c*lambda)/s is positive.
    double lam_a = inf;  // infinity marks an empty region
    double lam_b = inf;
    if (c > 0.0) {
        const double lo = std::max(0.0, -r / c);
        lam_a = std::max(lam_a_unproj, lo);
        lam_b = std::min(lam_b_unproj, lo);
    } else if (c < 0.0) {
        const double hi = -r / c;
        if (r > 0.0) {
            lam_a = std::min(lam_a_unproj, hi);
            lam_b = std::max(lam_b_unproj, hi);
        } else {
            lam_b = lam_b_unproj;
        }
    } else {
        if (r > 0.0)
            lam_a = lam_a_unproj;
        else
            lam_b = lam_b_unproj;
    }

    const auto f_a = [&](double lam) {
        if (!std::isfinite(lam)) return inf;
        lam = std::max(lam, kMinLambda);
        return 0.5 * (a_coef / lam + big * lam) - c * r / s;
    };
    const auto f_b = [&](double lam) {
        if (!std::isfinite(lam)) return inf;
        lam = std::max(lam, kMinLambda);
        return 0.5 * (q / lam + 2.0 * delta * lam);
    };

    if (f_a(lam_a) <= f_b(lam_b)) {
        sol.lambda = std::max(lam_a, kMinLambda);
        sol.nu = std::max(0.0, (r + c * sol.lambda) / s);
    } else {
        sol.lambda = std::max(lam_b, kMinLambda);
        sol.nu = 0.0;
    }
    return sol;
}

std::pair<Eigen::VectorXd, UpdateReport> trpo_step(const GaussianPolicy& policy, const EstimatedBatch& batch,
                                                   const TrustRegionCfg& cfg) {
    cfg.validate();
    const MlpSpec& spec = policy.spec();
    const auto [surr0, g] = surrogate_with_grad(spec, policy.params(), batch, batch.advantages);

    UpdateReport report;
    report.surrogate_before = surr0;
    report.expected_cost_before = batch.mean_discounted_cost;

    const auto fvp = [&](const Eigen::VectorXd& v) {
        return fisher_vector_product(spec, policy.params(), batch.obs, v, cfg.damping);
    };
    const auto core = natural_step(fvp, g, cfg);
    if (!core) return rejected_update(policy, report);

    const AcceptFn accept = [&](const Eigen::VectorXd&, double kl, double surr) {
        return surr > surr0 && kl <= cfg.delta;
    };
    return backtracking_search(policy, batch, cfg, core->full_step, report, accept, false);
}

std::pair<Eigen::VectorXd, UpdateReport> trpo_rp_step(const GaussianPolicy& policy,
                                                      const EstimatedBatch& batch,
                                                      const TrustRegionCfg& cfg) {
    return trpo_step(policy, batch, cfg);
}

std::pair<Eigen::VectorXd, UpdateReport> cpo_step(const GaussianPolicy& policy, const EstimatedBatch& batch,
                                                  const TrustRegionCfg& cfg,
                                                  const CostConstraintCfg& cost_cfg) {
    cfg.validate();
    cost_cfg.validate();
    const MlpSpec& spec = policy.spec();
    const auto [surr0, g] = surrogate_with_grad(spec, policy.params(), batch, batch.advantages);
    const auto [cost_mean_adv, b] = surrogate_with_grad(spec, policy.params(), batch, batch.cost_advantages);
    (void)cost_mean_adv;

    const double jc = batch.mean_discounted_cost;
    const double c = jc - cost_cfg.cost_limit;
    const double slack = 0.1 * cost_cfg.cost_limit;

    UpdateReport report;
    report.surrogate_before = surr0;
    report.expected_cost_before = jc;

    const auto fvp = [&](const Eigen::VectorXd& v) {
        return fisher_vector_product(spec, policy.params(), batch.obs, v, cfg.damping);
    };

    const AcceptFn accept_feasible = [&](const Eigen::VectorXd& trial, double kl, double surr) {
        return surr > surr0 && kl <= cfg.delta &&
               cost_surrogate(spec, trial, batch) <= cost_cfg.cost_limit + slack;
    };

    if (b.norm() < kTinyNorm) {
        // No usable cost direction; fall through to the plain trust-region
        // update (with zero costs this is the same arithmetic as trpo_step).
        const auto core = natural_step(fvp, g, cfg);
        if (!core) return rejected_update(policy, report);
        return backtracking_search(policy, batch, cfg, core->full_step, report, accept_feasible, false);
    }

    const Eigen::VectorXd x_b = conjugate_gradient(fvp, b, cfg.cg_iters, cfg.cg_residual_tol);
    const double s = b.dot(x_b);
    const auto core = natural_step(fvp, g, cfg);

    const auto recovery_update = [&]() {
        const Eigen::VectorXd full_step = -std::sqrt(2.0 * cfg.delta / s) * x_b;
        const AcceptFn accept_recovery = [&](const Eigen::VectorXd& trial, double kl, double) {
            return kl <= cfg.delta && cost_surrogate(spec, trial, batch) < jc;
        };
        return backtracking_search(policy, batch, cfg, full_step, report, accept_recovery, true);
    };

    if (!core) {
        if (c >= 0.0 && s > 0.0) return recovery_update();
        return rejected_update(policy, report);
    }
    if (!(s > 0.0)) {
        return backtracking_search(policy, batch, cfg, core->full_step, report, accept_feasible, false);
    }

    const double r = b.dot(core->x);
    const CpoDualSolution dual = solve_cpo_dual(core->q, r, s, c, cfg.delta);
    if (dual.recovery) return recovery_update();
    if (dual.constraint_inactive) {
        return backtracking_search(policy, batch, cfg, core->full_step, report, accept_feasible, false);
    }
    const Eigen::VectorXd full_step = (core->x - dual.nu * x_b) / dual.lambda;
    return backtracking_search(policy, batch, cfg, full_step, report, accept_feasible, false);
}

}  // namespace ctrpo
