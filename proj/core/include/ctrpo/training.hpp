#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctrpo/config.hpp"
#include "ctrpo/optimizers.hpp"
#include "ctrpo/policy.hpp"

namespace ctrpo {

/// One metrics row. Row 0 describes the policy right after behavior cloning
/// (no update); rows 1..iterations carry the batch statistics observed under
/// the pre-update parameters of that iteration plus the applied update.
struct IterationMetrics {
    int iteration = 0;
    std::int64_t cumulative_samples = 0;
    double mean_return = 0.0;  // raw (unpenalized) undiscounted episode return
    double success_rate = 0.0;
    double avg_violations = 0.0;
    double mean_discounted_cost = 0.0;
    bool has_update = false;
    UpdateReport update;
};

struct RunMetrics {
    std::vector<IterationMetrics> rows;
};

struct TrainResult {
    RunMetrics metrics;
    MlpSpec policy_spec;
    Eigen::VectorXd policy_params;
    MlpSpec value_spec;
    Eigen::VectorXd value_params;
    Eigen::VectorXd cost_value_params;
    double bc_logp_before = 0.0;
    double bc_logp_after = 0.0;
};

/// Value-net regression: full-batch Adam on mean squared error against
/// `targets`, stride-subsampled down to cfg.max_batch columns. Returns the
/// final loss.
double fit_value_net(const MlpSpec& spec, Eigen::VectorXd& params, const Eigen::MatrixXd& obs,
                     const Eigen::VectorXd& targets, const ValueFitCfg& cfg);

Eigen::VectorXd predict_values(const MlpSpec& spec, const Eigen::VectorXd& params, const Eigen::MatrixXd& obs);

/// Run behavior cloning plus the configured number of policy iterations.
/// When out_dir is non-empty, writes metrics.csv, updates.csv, config.txt,
/// and checkpoint.txt there (the directory must exist).
TrainResult train(const ExperimentConfig& cfg, const std::string& out_dir = "");

void write_metrics_csv(const std::string& path, const RunMetrics& metrics);
void write_updates_csv(const std::string& path, const RunMetrics& metrics);

MlpSpec policy_spec();
MlpSpec value_spec();

}  // namespace ctrpo
