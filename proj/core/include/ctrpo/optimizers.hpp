#pragma once

#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ctrpo/estimation.hpp"
#include "ctrpo/policy.hpp"

namespace ctrpo {

struct TrustRegionCfg {
    double delta = 0.01;  // mean-KL radius
    int cg_iters = 10;
    double cg_residual_tol = 1e-10;
    double damping = 0.1;
    double backtrack_ratio = 0.8;
    int max_backtracks = 10;

    void validate() const;
};

struct CostConstraintCfg {
    double cost_limit = 0.25;
    double gamma_c = 0.995;

    void validate() const;
};

enum class StepKind { Full, Backtracked, Recovery, Rejected };

std::string to_string(StepKind k);

struct UpdateReport {
    double surrogate_before = 0.0;
    double surrogate_after = 0.0;
    double kl_after = 0.0;
    double expected_cost_before = 0.0;
    double expected_cost_after_estimate = 0.0;
    StepKind step_kind = StepKind::Rejected;
    int backtracks = 0;
};

/// Importance-weighted advantage objective of the trust-region subproblem:
/// mean over the batch of exp(logp_new - logp_old) * advantage.
double surrogate_loss(const MlpSpec& spec, const Eigen::VectorXd& new_params, const EstimatedBatch& batch);

/// Linearized estimate of the new policy's expected discounted episode cost:
/// J_C + mean(ratio * cost_advantage) - mean(cost_advantage). Equals J_C at
/// the data-collecting parameters.
double cost_surrogate(const MlpSpec& spec, const Eigen::VectorXd& new_params, const EstimatedBatch& batch);

/// Value and parameter gradient of surrogate_loss at `params`, with the
/// advantage column free to be either stream.
std::pair<double, Eigen::VectorXd> surrogate_with_grad(const MlpSpec& spec, const Eigen::VectorXd& params,
                                                       const EstimatedBatch& batch,
                                                       const Eigen::VectorXd& advantages);

/// Solve A x = b for symmetric positive definite A given as an operator.
/// Stops when the residual norm drops to tol * ||b|| or iters run out.
Eigen::VectorXd conjugate_gradient(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                                   const Eigen::VectorXd& b, int iters, double tol);

/// Solution of the two-multiplier dual of the step subproblem
///   max g.x  s.t.  x.Hx/2 <= delta,  c + b.x <= 0
/// expressed through q = g.H^-1 g, r = b.H^-1 g, s = b.H^-1 b. The step is
/// reconstructed as x = (H^-1 g - nu H^-1 b) / lambda, or as the pure
/// cost-reduction direction -sqrt(2 delta / s) H^-1 b when recovery is set.
struct CpoDualSolution {
    bool recovery = false;
    bool constraint_inactive = false;  // cost term unreachable inside the trust region
    double lambda = 0.0;
    double nu = 0.0;
};

CpoDualSolution solve_cpo_dual(double q, double r, double s, double c, double delta);

std::pair<Eigen::VectorXd, UpdateReport> trpo_step(const GaussianPolicy& policy, const EstimatedBatch& batch,
                                                   const TrustRegionCfg& cfg);

/// Identical update rule to trpo_step; callers must hand it a batch built
/// from the penalized reward stream (reward - cost), see penalize_rewards().
std::pair<Eigen::VectorXd, UpdateReport> trpo_rp_step(const GaussianPolicy& policy,
                                                      const EstimatedBatch& batch, const TrustRegionCfg& cfg);

std::pair<Eigen::VectorXd, UpdateReport> cpo_step(const GaussianPolicy& policy, const EstimatedBatch& batch,
                                                  const TrustRegionCfg& cfg, const CostConstraintCfg& cost_cfg);

}  // namespace ctrpo
