#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctrpo/estimation.hpp"
#include "ctrpo/policy.hpp"

namespace ctrpo {

/// Sample `episodes` on-policy episodes. Episode e is driven entirely by
/// Rng::stream(seed, stream, e) (reset layout and action noise), so the
/// result is identical for any `workers` count; workers only decide which
/// thread runs which episode. Value-prediction columns are zero-filled.
std::vector<Trajectory> collect_rollouts(const EnvParams& env_params, const ConstraintCfg& constraint_cfg,
                                         const GaussianPolicy& policy, int episodes, std::uint64_t seed,
                                         std::uint64_t stream, int workers);

struct EvalEpisode {
    bool success = false;
    int violations = 0;
    double episode_return = 0.0;
    double discounted_cost = 0.0;
};

struct EvalStats {
    double success_rate = 0.0;
    double avg_violations = 0.0;
    double mean_return = 0.0;
    double mean_discounted_cost = 0.0;
};

/// Deterministic-mean-action evaluation; episode e resets from
/// Rng::stream(seed, 0, e).
std::vector<EvalEpisode> evaluate_policy(const EnvParams& env_params, const ConstraintCfg& constraint_cfg,
                                         const GaussianPolicy& policy, int episodes, std::uint64_t seed,
                                         double gamma_c);

EvalStats aggregate_eval(const std::vector<EvalEpisode>& episodes);

void write_eval_csv(const std::string& path, const std::vector<EvalEpisode>& episodes);

/// Run one mean-action episode and dump per-step rows:
/// step, hand xyz, object xyz, d, t, cost, reward.
void dump_episode_csv(const std::string& path, const EnvParams& env_params,
                      const ConstraintCfg& constraint_cfg, const GaussianPolicy& policy, std::uint64_t seed);

}  // namespace ctrpo
