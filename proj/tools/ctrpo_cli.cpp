// Command-line front end: train / sweep / eval / demo.

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "ctrpo/checkpoint.hpp"
#include "ctrpo/config.hpp"
#include "ctrpo/expert.hpp"
#include "ctrpo/rollout.hpp"
#include "ctrpo/sweep.hpp"
#include "ctrpo/training.hpp"

namespace fs = std::filesystem;

namespace {

ctrpo::ExperimentConfig load_or_default(const std::string& path) {
    if (path.empty()) return ctrpo::ExperimentConfig{};
    return ctrpo::load_config(path);
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    const ctrpo::ExperimentConfig cfg = load_or_default(config_path);
    fs::create_directories(out_dir);
    const ctrpo::TrainResult result = ctrpo::train(cfg, out_dir);
    const ctrpo::IterationMetrics& last = result.metrics.rows.back();
    std::printf("trained %s for %zu iterations (%lld samples)\n", ctrpo::to_string(cfg.algorithm).c_str(),
                result.metrics.rows.size() - 1, static_cast<long long>(last.cumulative_samples));
    std::printf("final: return %.3f  success %.3f  violations %.3f  J_C %.4f\n", last.mean_return,
                last.success_rate, last.avg_violations, last.mean_discounted_cost);
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
}

int cmd_sweep(int experiment, const std::string& config_path, const std::string& out_dir, int rollouts) {
    const ctrpo::ExperimentConfig base = load_or_default(config_path);
    fs::create_directories(out_dir);
    const auto results = ctrpo::run_sweep(experiment, base, out_dir, rollouts);
    int failures = 0;
    for (const auto& r : results) {
        if (r.ok) {
            std::printf("%-40s success %.3f  violations %.3f\n", r.name.c_str(), r.eval.success_rate,
                        r.eval.avg_violations);
        } else {
            std::printf("%-40s FAILED: %s\n", r.name.c_str(), r.error.c_str());
            ++failures;
        }
    }
    std::printf("summary in %s/summary.csv\n", out_dir.c_str());
    return failures == 0 ? 0 : 1;
}

int cmd_eval(const std::string& checkpoint_path, int rollouts, const std::string& config_path,
             const std::string& out_path, std::uint64_t seed_override, bool has_seed) {
    const ctrpo::Checkpoint ckpt = ctrpo::load_checkpoint(checkpoint_path);
    const ctrpo::ParamBlock& block = ckpt.find("policy");
    const ctrpo::GaussianPolicy policy(block.spec, block.params);

    // Constraint / env geometry come from an explicit --config, else from the
    // config.txt written next to the checkpoint at training time, else from
    // the defaults.
    std::string cfg_path = config_path;
    if (cfg_path.empty()) {
        const fs::path sibling = fs::path(checkpoint_path).parent_path() / "config.txt";
        if (fs::exists(sibling)) cfg_path = sibling.string();
    }
    const ctrpo::ExperimentConfig cfg = load_or_default(cfg_path);

    const std::uint64_t seed = has_seed ? seed_override : cfg.training.seed + ctrpo::kEvalSeedOffset;
    const auto episodes =
        ctrpo::evaluate_policy(cfg.env, cfg.constraint, policy, rollouts, seed, cfg.gamma_c);
    const ctrpo::EvalStats stats = ctrpo::aggregate_eval(episodes);

    std::string eval_path = out_path;
    if (eval_path.empty())
        eval_path = (fs::path(checkpoint_path).parent_path() / "eval.csv").string();
    ctrpo::write_eval_csv(eval_path, episodes);

    std::printf("rollouts %d  success %.3f  violations %.3f  return %.3f  J_C %.4f\n", rollouts,
                stats.success_rate, stats.avg_violations, stats.mean_return, stats.mean_discounted_cost);
    std::printf("episodes in %s\n", eval_path.c_str());
    return 0;
}

int cmd_demo(int n, const std::string& out_path, const std::string& config_path, std::uint64_t seed) {
    const ctrpo::ExperimentConfig cfg = load_or_default(config_path);
    ctrpo::Env env(cfg.env, cfg.constraint);
    const auto demos = ctrpo::collect_demos(env, n, seed);
    if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
        fs::create_directories(parent);
    ctrpo::write_demos(out_path, demos);
    std::printf("wrote %d expert episodes to %s\n", n, out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained trust-region policy optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string checkpoint_path;
    std::string out_path;
    int experiment = 1;
    int rollouts = 500;
    int demo_n = 25;
    std::uint64_t seed = 0;

    CLI::App* train = app.add_subcommand("train", "train one configuration");
    train->add_option("--config", config_path, "config file (key = value)")->check(CLI::ExistingFile);
    train->add_option("--out", out_dir, "output directory")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "run one experiment grid");
    sweep->add_option("--experiment", experiment, "experiment id")
        ->required()
        ->check(CLI::Range(1, 4));
    sweep->add_option("--config", config_path, "base config file")->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--rollouts", rollouts, "evaluation rollouts per run");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--rollouts", rollouts, "number of evaluation rollouts");
    eval->add_option("--config", config_path, "config for env/constraint")->check(CLI::ExistingFile);
    eval->add_option("--out", out_path, "eval csv path (default: next to checkpoint)");
    CLI::Option* eval_seed = eval->add_option("--seed", seed, "evaluation seed");

    CLI::App* demo = app.add_subcommand("demo", "collect scripted-expert demonstrations");
    demo->add_option("--n", demo_n, "number of episodes");
    demo->add_option("--out", out_path, "output csv file")->required();
    demo->add_option("--config", config_path, "config for env/constraint")->check(CLI::ExistingFile);
    demo->add_option("--seed", seed, "demo seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(config_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(experiment, config_path, out_dir, rollouts);
        if (eval->parsed())
            return cmd_eval(checkpoint_path, rollouts, config_path, out_path, seed,
                            eval_seed->count() > 0);
        if (demo->parsed()) return cmd_demo(demo_n, out_path, config_path, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
