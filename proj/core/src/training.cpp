#include "ctrpo/training.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

#include "ctrpo/adam.hpp"
#include "ctrpo/autodiff.hpp"
#include "ctrpo/bc.hpp"
#include "ctrpo/checkpoint.hpp"
#include "ctrpo/csv.hpp"
#include "ctrpo/expert.hpp"
#include "ctrpo/rollout.hpp"

namespace ctrpo {

using ad::Tape;
using ad::Var;

namespace {

double mean_episode_cost(const std::vector<Trajectory>& trajs, double gamma_c) {
    double sum = 0.0;
    for (const Trajectory& tr : trajs) sum += discounted_returns(tr.costs, gamma_c)[0];
    return sum / static_cast<double>(trajs.size());
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> stride_subsample(const Eigen::MatrixXd& obs,
                                                             const Eigen::VectorXd& targets, int max_batch) {
    const Eigen::Index n = obs.cols();
    if (n <= max_batch) return {obs, targets};
    const Eigen::Index stride = (n + max_batch - 1) / max_batch;
    const Eigen::Index m = (n + stride - 1) / stride;
    Eigen::MatrixXd sub_obs(obs.rows(), m);
    Eigen::VectorXd sub_targets(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        sub_obs.col(i) = obs.col(i * stride);
        sub_targets[i] = targets[i * stride];
    }
    return {std::move(sub_obs), std::move(sub_targets)};
}

}  // namespace

MlpSpec policy_spec() { return MlpSpec{kObsDim, {32, 32}, kActionDim, Activation::Tanh}; }
MlpSpec value_spec() { return MlpSpec{kObsDim, {128, 128}, 1, Activation::Tanh}; }

Eigen::VectorXd predict_values(const MlpSpec& spec, const Eigen::VectorXd& params,
                               const Eigen::MatrixXd& obs) {
    return mlp_forward(spec, params, obs).row(0).transpose();
}

double fit_value_net(const MlpSpec& spec, Eigen::VectorXd& params, const Eigen::MatrixXd& obs,
                     const Eigen::VectorXd& targets, const ValueFitCfg& cfg) {
    if (obs.cols() != targets.size()) throw std::invalid_argument("value-fit target size mismatch");
    const auto [sub_obs, sub_targets] = stride_subsample(obs, targets, cfg.max_batch);
    const Eigen::Index m = sub_obs.cols();

    Adam opt(params.size(), cfg.lr);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Tape tape;
        const Var theta = tape.leaf(params);
        const Var pred = mlp_forward_tape(tape, spec, theta, tape.constant(sub_obs), 0);
        const Var err = tape.sub(pred, tape.constant(sub_targets.transpose()));
        const Var loss = tape.scale(tape.sum(tape.mul(err, err)), 1.0 / static_cast<double>(m));
        tape.backward(loss);
        const Eigen::VectorXd grad = tape.adjoint(theta);
        opt.step(params, grad);
    }
    const Eigen::VectorXd final_pred = predict_values(spec, params, sub_obs);
    return (final_pred - sub_targets).squaredNorm() / static_cast<double>(m);
}

TrainResult train(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    const MlpSpec pspec = policy_spec();
    const MlpSpec vspec = value_spec();
    const std::uint64_t seed = cfg.training.seed;

    GaussianPolicy policy = GaussianPolicy::init(pspec, seed * 4 + 1, 0.01);
    Eigen::VectorXd value_params = init_mlp_params(vspec, seed * 4 + 2);
    Eigen::VectorXd cost_value_params = init_mlp_params(vspec, seed * 4 + 3);

    Env demo_env(cfg.env, cfg.constraint);
    const std::vector<DemoEpisode> demos = collect_demos(demo_env, cfg.bc.num_demos, seed);
    const BcResult bc = behavior_clone(policy, demos, cfg.bc.lr, cfg.bc.epochs);
    policy.set_params(bc.params);

    TrainResult result;
    result.policy_spec = pspec;
    result.value_spec = vspec;
    result.bc_logp_before = bc.demo_logp_before;
    result.bc_logp_after = bc.demo_logp_after;

    RunMetrics& metrics = result.metrics;
    std::int64_t samples = 0;

    const auto batch_stats_row = [&](int iteration, const std::vector<Trajectory>& trajs) {
        IterationMetrics row;
        row.iteration = iteration;
        for (const Trajectory& tr : trajs) {
            row.mean_return += tr.rewards.sum();
            row.success_rate += tr.success ? 1.0 : 0.0;
            row.avg_violations += tr.violations;
            samples += tr.length();
        }
        const double n = static_cast<double>(trajs.size());
        row.mean_return /= n;
        row.success_rate /= n;
        row.avg_violations /= n;
        row.mean_discounted_cost = mean_episode_cost(trajs, cfg.gamma_c);
        row.cumulative_samples = samples;
        return row;
    };

    const auto flush_outputs = [&]() {
        if (out_dir.empty()) return;
        write_metrics_csv(out_dir + "/metrics.csv", metrics);
        write_updates_csv(out_dir + "/updates.csv", metrics);
        save_config(out_dir + "/config.txt", cfg);
        Checkpoint ckpt;
        ckpt.blocks.push_back({"policy", pspec, policy.params()});
        ckpt.blocks.push_back({"value", vspec, value_params});
        ckpt.blocks.push_back({"cost_value", vspec, cost_value_params});
        save_checkpoint(out_dir + "/checkpoint.txt", ckpt);
    };

    {
        const std::vector<Trajectory> trajs =
            collect_rollouts(cfg.env, cfg.constraint, policy, cfg.training.episodes_per_iteration, seed, 1,
                             cfg.training.rollout_workers);
        metrics.rows.push_back(batch_stats_row(0, trajs));
    }

    try {
        for (int k = 1; k <= cfg.training.iterations; ++k) {
            std::vector<Trajectory> trajs =
                collect_rollouts(cfg.env, cfg.constraint, policy, cfg.training.episodes_per_iteration, seed,
                                 static_cast<std::uint64_t>(k) + 1, cfg.training.rollout_workers);
            for (Trajectory& tr : trajs) {
                tr.value_preds = predict_values(vspec, value_params, tr.obs);
                if (cfg.algorithm == Algorithm::Cpo)
                    tr.cost_value_preds = predict_values(vspec, cost_value_params, tr.obs);
            }

            IterationMetrics row = batch_stats_row(k, trajs);

            std::vector<Trajectory> penalized;
            if (cfg.algorithm == Algorithm::TrpoRp) penalized = penalize_rewards(trajs);
            const std::vector<Trajectory>& basis = cfg.algorithm == Algorithm::TrpoRp ? penalized : trajs;
            const EstimatedBatch batch = build_batch(basis, cfg.gamma, cfg.gamma_c, cfg.gae_lambda);

            std::pair<Eigen::VectorXd, UpdateReport> update;
            switch (cfg.algorithm) {
                case Algorithm::Trpo: update = trpo_step(policy, batch, cfg.trust_region); break;
                case Algorithm::TrpoRp: update = trpo_rp_step(policy, batch, cfg.trust_region); break;
                case Algorithm::Cpo:
                    update = cpo_step(policy, batch, cfg.trust_region,
                                      CostConstraintCfg{cfg.constraint.cl, cfg.gamma_c});
                    break;
            }
            policy.set_params(update.first);
            row.has_update = true;
            row.update = update.second;
            metrics.rows.push_back(row);

            fit_value_net(vspec, value_params, batch.obs, batch.reward_returns, cfg.value_fit);
            if (cfg.algorithm == Algorithm::Cpo)
                fit_value_net(vspec, cost_value_params, batch.obs, batch.cost_returns, cfg.value_fit);
        }
    } catch (...) {
        flush_outputs();
        throw;
    }

    result.policy_params = policy.params();
    result.value_params = value_params;
    result.cost_value_params = cost_value_params;
    flush_outputs();
    return result;
}

void write_metrics_csv(const std::string& path, const RunMetrics& metrics) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "iteration,cumulative_samples,mean_return,success_rate,avg_violations,mean_discounted_cost,"
           "surrogate_before,surrogate_after,kl_after,expected_cost_before,expected_cost_after_estimate,"
           "step_kind,backtracks\n";
    for (const IterationMetrics& row : metrics.rows) {
        out << row.iteration << "," << row.cumulative_samples << "," << csv_double(row.mean_return) << ","
            << csv_double(row.success_rate) << "," << csv_double(row.avg_violations) << ","
            << csv_double(row.mean_discounted_cost) << ",";
        if (row.has_update) {
            out << csv_double(row.update.surrogate_before) << "," << csv_double(row.update.surrogate_after)
                << "," << csv_double(row.update.kl_after) << ","
                << csv_double(row.update.expected_cost_before) << ","
                << csv_double(row.update.expected_cost_after_estimate) << "," << to_string(row.update.step_kind)
                << "," << row.update.backtracks << "\n";
        } else {
            out << "0,0,0,0,0,none,0\n";
        }
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_updates_csv(const std::string& path, const RunMetrics& metrics) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "iteration,surrogate_before,surrogate_after,kl_after,expected_cost_before,"
           "expected_cost_after_estimate,step_kind,backtracks\n";
    for (const IterationMetrics& row : metrics.rows) {
        if (!row.has_update) continue;
        out << row.iteration << "," << csv_double(row.update.surrogate_before) << ","
            << csv_double(row.update.surrogate_after) << "," << csv_double(row.update.kl_after) << ","
            << csv_double(row.update.expected_cost_before) << ","
            << csv_double(row.update.expected_cost_after_estimate) << "," << to_string(row.update.step_kind)
            << "," << row.update.backtracks << "\n";
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ctrpo
