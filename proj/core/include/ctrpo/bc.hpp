#pragma once

#include <vector>

#include "ctrpo/expert.hpp"
#include "ctrpo/policy.hpp"

namespace ctrpo {

struct BcResult {
    Eigen::VectorXd params;
    double demo_logp_before = 0.0;
    double demo_logp_after = 0.0;
};

/// Supervised pretraining: full-batch Adam ascent on the mean demo action
/// log-likelihood, one step per epoch. The log-std entries are frozen so the
/// deterministic demonstrations cannot collapse the exploration noise before
/// training starts.
BcResult behavior_clone(const GaussianPolicy& policy, const std::vector<DemoEpisode>& demos, double lr,
                        int epochs);

/// Mean log-likelihood of the demo actions under the given parameters.
double demo_log_likelihood(const MlpSpec& spec, const Eigen::VectorXd& params,
                           const std::vector<DemoEpisode>& demos);

}  // namespace ctrpo
