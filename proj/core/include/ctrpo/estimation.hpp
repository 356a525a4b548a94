#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctrpo/env.hpp"

namespace ctrpo {

/// One on-policy episode. Columns index steps; value_preds and
/// cost_value_preds are filled by the training loop from the current value
/// networks before advantage estimation.
struct Trajectory {
    Eigen::MatrixXd obs;      // kObsDim x T
    Eigen::MatrixXd actions;  // kActionDim x T
    Eigen::VectorXd rewards;
    Eigen::VectorXd costs;
    Eigen::VectorXd logps;  // behavior-policy log densities
    Eigen::VectorXd value_preds;
    Eigen::VectorXd cost_value_preds;
    bool done = false;  // terminated by success (as opposed to horizon cut)
    bool success = false;
    int violations = 0;

    Eigen::Index length() const { return rewards.size(); }
    void validate() const;
};

/// Flattened update batch. Reward advantages are normalized to zero mean and
/// unit population standard deviation; cost advantages stay in absolute
/// units because the cost constraint is expressed against the raw limit.
struct EstimatedBatch {
    Eigen::MatrixXd obs;      // kObsDim x N
    Eigen::MatrixXd actions;  // kActionDim x N
    Eigen::VectorXd logps;
    Eigen::VectorXd advantages;
    Eigen::VectorXd cost_advantages;
    Eigen::VectorXd reward_returns;
    Eigen::VectorXd cost_returns;
    double mean_discounted_cost = 0.0;  // J_C: mean over episodes of sum_t gamma_c^t cost_t
    int num_episodes = 0;

    Eigen::Index size() const { return logps.size(); }
};

/// G_t = x_t + gamma * G_{t+1}, with G at the final step equal to the final
/// entry (no bootstrap past episode end).
Eigen::VectorXd discounted_returns(const Eigen::VectorXd& values, double gamma);

/// Generalized advantage estimation with terminal value 0:
/// delta_t = x_t + gamma * V_{t+1} - V_t, A_t = delta_t + gamma*lambda*A_{t+1}.
Eigen::VectorXd gae(const Eigen::VectorXd& values, const Eigen::VectorXd& value_preds, double gamma,
                    double lambda);

/// Assemble the flattened batch: GAE on the reward stream (normalized) and
/// on the cost stream (not normalized), discounted return targets for both
/// value networks. Zero-variance reward advantages are centered but not
/// scaled.
EstimatedBatch build_batch(const std::vector<Trajectory>& trajectories, double gamma, double gamma_c,
                           double lambda);

/// Copy of the trajectories with each reward replaced by reward - cost, for
/// the reward-penalty baseline. Costs are kept so telemetry still sees them.
std::vector<Trajectory> penalize_rewards(const std::vector<Trajectory>& trajectories);

}  // namespace ctrpo
