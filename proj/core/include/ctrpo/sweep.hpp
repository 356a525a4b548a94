#pragma once

#include <string>
#include <vector>

#include "ctrpo/config.hpp"
#include "ctrpo/rollout.hpp"

namespace ctrpo {

/// Added to the training seed to derive the evaluation seed, so evaluation
/// episodes never share RNG streams with training episodes.
constexpr std::uint64_t kEvalSeedOffset = 1000003;

struct SweepRun {
    std::string name;
    ExperimentConfig config;
};

/// Expand one of the four experiment grids on top of `base` (algorithm and
/// constraint fields are overwritten; everything else carries through):
///   1: r in {0.1, 0.05, 0.03} for each of cpo, trpo, trpo_rp (c=0.01, cl=0.25)
///   2: cpo, r in {0.15, 0.05, 0.03} (c=0.01, cl=0.25)
///   3: cpo, cl in {0.5, 0.25, 0.1} (r=0.05, c=0.01)
///   4: cpo, (c, cl) in {(10, 250), (0.1, 2.5), (0.01, 0.25)} (r=0.05)
std::vector<SweepRun> sweep_configs(int experiment, const ExperimentConfig& base);

struct SweepRunResult {
    std::string name;
    bool ok = false;
    std::string error;
    EvalStats eval;
};

/// Train every configuration of the experiment, each into its own
/// subdirectory of out_dir, evaluate the final policy, and write
/// summary.csv plus overlay charts of success rate and average violations
/// against cumulative samples. A failing run is recorded and the sweep
/// moves on.
std::vector<SweepRunResult> run_sweep(int experiment, const ExperimentConfig& base,
                                      const std::string& out_dir, int eval_rollouts = 500);

}  // namespace ctrpo
