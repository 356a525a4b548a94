#include "ctrpo/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctrpo {

void Trajectory::validate() const {
    const Eigen::Index T = rewards.size();
    if (T < 1) throw std::invalid_argument("trajectory must have at least one step");
    if (obs.cols() != T || actions.cols() != T || costs.size() != T || logps.size() != T ||
        value_preds.size() != T || cost_value_preds.size() != T)
        throw std::invalid_argument("trajectory field lengths disagree");
    if (!logps.allFinite()) throw std::invalid_argument("non-finite behavior log density");
}

Eigen::VectorXd discounted_returns(const Eigen::VectorXd& values, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1], got " + std::to_string(gamma));
    Eigen::VectorXd out(values.size());
    double acc = 0.0;
    for (Eigen::Index t = values.size() - 1; t >= 0; --t) {
        acc = values[t] + gamma * acc;
        out[t] = acc;
    }
    return out;
}

Eigen::VectorXd gae(const Eigen::VectorXd& values, const Eigen::VectorXd& value_preds, double gamma,
                    double lambda) {
    if (values.size() != value_preds.size()) throw std::invalid_argument("gae length mismatch");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    const Eigen::Index T = values.size();
    Eigen::VectorXd adv(T);
    double acc = 0.0;
    for (Eigen::Index t = T - 1; t >= 0; --t) {
        const double next_value = (t + 1 < T) ? value_preds[t + 1] : 0.0;
        const double delta = values[t] + gamma * next_value - value_preds[t];
        acc = delta + gamma * lambda * acc;
        adv[t] = acc;
    }
    return adv;
}

EstimatedBatch build_batch(const std::vector<Trajectory>& trajectories, double gamma, double gamma_c,
                           double lambda) {
    if (trajectories.empty()) throw std::invalid_argument("batch needs at least one trajectory");

    Eigen::Index total = 0;
    for (const Trajectory& tr : trajectories) {
        tr.validate();
        total += tr.length();
    }

    EstimatedBatch batch;
    batch.obs.resize(kObsDim, total);
    batch.actions.resize(kActionDim, total);
    batch.logps.resize(total);
    batch.advantages.resize(total);
    batch.cost_advantages.resize(total);
    batch.reward_returns.resize(total);
    batch.cost_returns.resize(total);
    batch.num_episodes = static_cast<int>(trajectories.size());

    Eigen::Index at = 0;
    double cost_sum = 0.0;
    for (const Trajectory& tr : trajectories) {
        const Eigen::Index T = tr.length();
        batch.obs.middleCols(at, T) = tr.obs;
        batch.actions.middleCols(at, T) = tr.actions;
        batch.logps.segment(at, T) = tr.logps;
        batch.advantages.segment(at, T) = gae(tr.rewards, tr.value_preds, gamma, lambda);
        batch.cost_advantages.segment(at, T) = gae(tr.costs, tr.cost_value_preds, gamma_c, lambda);
        batch.reward_returns.segment(at, T) = discounted_returns(tr.rewards, gamma);
        const Eigen::VectorXd cost_ret = discounted_returns(tr.costs, gamma_c);
        batch.cost_returns.segment(at, T) = cost_ret;
        cost_sum += cost_ret[0];
        at += T;
    }
    batch.mean_discounted_cost = cost_sum / static_cast<double>(trajectories.size());

    const double mean = batch.advantages.mean();
    batch.advantages.array() -= mean;
    const double std_dev = std::sqrt(batch.advantages.squaredNorm() / static_cast<double>(total));
    if (std_dev > 1e-12) batch.advantages /= std_dev;
    return batch;
}

std::vector<Trajectory> penalize_rewards(const std::vector<Trajectory>& trajectories) {
    std::vector<Trajectory> out = trajectories;
    for (Trajectory& tr : out) tr.rewards -= tr.costs;
    return out;
}

}  // namespace ctrpo
