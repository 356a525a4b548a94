#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctrpo/env.hpp"

namespace ctrpo {

/// One demonstration episode, observations and actions column per step.
struct DemoEpisode {
    Eigen::MatrixXd obs;      // kObsDim x T
    Eigen::MatrixXd actions;  // kActionDim x T
};

/// Deterministic axis-following controller: pre-grasp it heads straight for
/// the object (staying on the constraint axis by construction) with the
/// grasp channel engaged; post-grasp it heads straight for the goal.
/// Velocity commands are in units of max_speed, clamped to unit norm.
EnvAction expert_action(const EnvState& state, const EnvParams& params);

/// Run the expert for n episodes; episode e draws its layout from
/// Rng::stream(seed, 0, e).
std::vector<DemoEpisode> collect_demos(Env& env, int n, std::uint64_t seed);

/// CSV round-trip: columns episode, step, 13 observation entries, 4 action
/// entries.
void write_demos(const std::string& path, const std::vector<DemoEpisode>& demos);
std::vector<DemoEpisode> read_demos(const std::string& path);

}  // namespace ctrpo
