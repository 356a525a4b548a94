#include "ctrpo/rollout.hpp"

#include <exception>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "ctrpo/csv.hpp"

namespace ctrpo {

namespace {

Trajectory run_episode(Env& env, const GaussianPolicy& policy, Rng& rng) {
    Observation obs = env.reset(rng);
    std::vector<Observation> obs_list;
    std::vector<EnvAction> act_list;
    std::vector<double> rewards, costs, logps;
    Trajectory traj;
    while (true) {
        const Eigen::VectorXd action = policy.sample(obs, rng);
        const double logp = policy.log_prob(obs, action)[0];
        obs_list.push_back(obs);
        act_list.push_back(action);
        logps.push_back(logp);
        const StepResult res = env.step(action);
        rewards.push_back(res.reward);
        costs.push_back(res.cost);
        traj.violations += res.violations;
        obs = res.obs;
        if (res.done) {
            traj.success = res.success;
            traj.done = res.success;
            break;
        }
    }
    const auto T = static_cast<Eigen::Index>(rewards.size());
    traj.obs.resize(kObsDim, T);
    traj.actions.resize(kActionDim, T);
    traj.rewards.resize(T);
    traj.costs.resize(T);
    traj.logps.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        traj.obs.col(t) = obs_list[static_cast<std::size_t>(t)];
        traj.actions.col(t) = act_list[static_cast<std::size_t>(t)];
        traj.rewards[t] = rewards[static_cast<std::size_t>(t)];
        traj.costs[t] = costs[static_cast<std::size_t>(t)];
        traj.logps[t] = logps[static_cast<std::size_t>(t)];
    }
    traj.value_preds = Eigen::VectorXd::Zero(T);
    traj.cost_value_preds = Eigen::VectorXd::Zero(T);
    return traj;
}

}  // namespace

std::vector<Trajectory> collect_rollouts(const EnvParams& env_params, const ConstraintCfg& constraint_cfg,
                                         const GaussianPolicy& policy, int episodes, std::uint64_t seed,
                                         std::uint64_t stream, int workers) {
    if (episodes < 1) throw std::invalid_argument("episode count must be positive");
    if (workers < 1) throw std::invalid_argument("worker count must be positive");
    workers = std::min(workers, episodes);

    std::vector<Trajectory> out(static_cast<std::size_t>(episodes));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

    const auto work = [&](int w) {
        try {
            Env env(env_params, constraint_cfg);
            for (int e = w; e < episodes; e += workers) {
                Rng rng = Rng::stream(seed, stream, static_cast<std::uint64_t>(e));
                out[static_cast<std::size_t>(e)] = run_episode(env, policy, rng);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return out;
}

std::vector<EvalEpisode> evaluate_policy(const EnvParams& env_params, const ConstraintCfg& constraint_cfg,
                                         const GaussianPolicy& policy, int episodes, std::uint64_t seed,
                                         double gamma_c) {
    if (episodes < 1) throw std::invalid_argument("episode count must be positive");
    Env env(env_params, constraint_cfg);
    std::vector<EvalEpisode> out(static_cast<std::size_t>(episodes));
    for (int e = 0; e < episodes; ++e) {
        Rng rng = Rng::stream(seed, 0, static_cast<std::uint64_t>(e));
        Observation obs = env.reset(rng);
        EvalEpisode& row = out[static_cast<std::size_t>(e)];
        double discount = 1.0;
        while (true) {
            const EnvAction action = policy.mean(obs);
            const StepResult res = env.step(action);
            row.episode_return += res.reward;
            row.discounted_cost += discount * res.cost;
            row.violations += res.violations;
            discount *= gamma_c;
            obs = res.obs;
            if (res.done) {
                row.success = res.success;
                break;
            }
        }
    }
    return out;
}

EvalStats aggregate_eval(const std::vector<EvalEpisode>& episodes) {
    if (episodes.empty()) throw std::invalid_argument("no evaluation episodes");
    EvalStats stats;
    for (const EvalEpisode& e : episodes) {
        stats.success_rate += e.success ? 1.0 : 0.0;
        stats.avg_violations += e.violations;
        stats.mean_return += e.episode_return;
        stats.mean_discounted_cost += e.discounted_cost;
    }
    const double n = static_cast<double>(episodes.size());
    stats.success_rate /= n;
    stats.avg_violations /= n;
    stats.mean_return /= n;
    stats.mean_discounted_cost /= n;
    return stats;
}

void write_eval_csv(const std::string& path, const std::vector<EvalEpisode>& episodes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "episode,success,violations,return,discounted_cost\n";
    for (std::size_t e = 0; e < episodes.size(); ++e) {
        out << e << "," << (episodes[e].success ? 1 : 0) << "," << episodes[e].violations << ","
            << csv_double(episodes[e].episode_return) << "," << csv_double(episodes[e].discounted_cost)
            << "\n";
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void dump_episode_csv(const std::string& path, const EnvParams& env_params,
                      const ConstraintCfg& constraint_cfg, const GaussianPolicy& policy,
                      std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "step,hand_x,hand_y,hand_z,object_x,object_y,object_z,d,t,cost,reward\n";

    Env env(env_params, constraint_cfg);
    Rng rng = Rng::stream(seed, 0, 0);
    Observation obs = env.reset(rng);
    int step = 0;
    while (true) {
        const EnvAction action = policy.mean(obs);
        const StepResult res = env.step(action);
        const EnvState& s = env.state();
        const ViolationResult vr = env.constraint().evaluate(s.hand);
        out << step << "," << csv_double(s.hand.x()) << "," << csv_double(s.hand.y()) << ","
            << csv_double(s.hand.z()) << "," << csv_double(s.object.x()) << "," << csv_double(s.object.y())
            << "," << csv_double(s.object.z()) << "," << csv_double(vr.d) << "," << csv_double(vr.t) << ","
            << csv_double(res.cost) << "," << csv_double(res.reward) << "\n";
        ++step;
        obs = res.obs;
        if (res.done) break;
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ctrpo
