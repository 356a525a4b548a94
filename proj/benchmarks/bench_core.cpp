// Microbenchmarks for the kernels that dominate a training iteration:
// constraint evaluation, environment stepping, advantage estimation,
// policy densities, Fisher-vector products, and the CG solve.

#include <benchmark/benchmark.h>

#include <vector>

#include "ctrpo/env.hpp"
#include "ctrpo/estimation.hpp"
#include "ctrpo/geometry.hpp"
#include "ctrpo/optimizers.hpp"
#include "ctrpo/policy.hpp"
#include "ctrpo/rng.hpp"
#include "ctrpo/rollout.hpp"
#include "ctrpo/training.hpp"

namespace {

using namespace ctrpo;

GaussianPolicy make_policy() { return GaussianPolicy::init(policy_spec(), 7, 0.01); }

Eigen::MatrixXd random_obs(Rng& rng, int n) {
    Eigen::MatrixXd obs(kObsDim, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < kObsDim; ++i) obs(i, j) = rng.gaussian();
    return obs;
}

void bm_constraint_evaluate(benchmark::State& state) {
    const CylinderConstraint cons(Point3(0, 0, 0.2), Point3(0.1, -0.05, 0.0), 0.05, -0.1, 1.1, 0.01, 0.25);
    Rng rng(1);
    std::vector<Point3> points(1024);
    for (auto& p : points) p = Point3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0, 0.3));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cons.evaluate(points[i++ & 1023]));
    }
}
BENCHMARK(bm_constraint_evaluate);

void bm_env_episode(benchmark::State& state) {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(2);
    for (auto _ : state) {
        (void)env.reset(rng);
        EnvAction a;
        bool done = false;
        while (!done) {
            a << rng.gaussian(), rng.gaussian(), rng.gaussian(), 1.0;
            done = env.step(a).done;
        }
    }
}
BENCHMARK(bm_env_episode);

void bm_collect_rollouts(benchmark::State& state) {
    const GaussianPolicy policy = make_policy();
    for (auto _ : state) {
        benchmark::DoNotOptimize(collect_rollouts(EnvParams{}, ConstraintCfg{}, policy, 4, 1, 1, 1));
    }
}
BENCHMARK(bm_collect_rollouts)->Unit(benchmark::kMillisecond);

void bm_build_batch(benchmark::State& state) {
    const GaussianPolicy policy = make_policy();
    const auto trajectories = collect_rollouts(EnvParams{}, ConstraintCfg{}, policy, 20, 1, 1, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_batch(trajectories, 0.995, 0.995, 0.97));
    }
}
BENCHMARK(bm_build_batch);

void bm_policy_log_prob(benchmark::State& state) {
    const GaussianPolicy policy = make_policy();
    Rng rng(3);
    const Eigen::MatrixXd obs = random_obs(rng, 1024);
    Eigen::MatrixXd actions(kActionDim, 1024);
    for (int j = 0; j < 1024; ++j) actions.col(j) = policy.sample(obs.col(j), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(policy.log_prob(obs, actions));
    }
}
BENCHMARK(bm_policy_log_prob);

void bm_fisher_vector_product(benchmark::State& state) {
    const GaussianPolicy policy = make_policy();
    Rng rng(4);
    const Eigen::MatrixXd obs = random_obs(rng, static_cast<int>(state.range(0)));
    Eigen::VectorXd v(policy.param_count());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fisher_vector_product(policy.spec(), policy.params(), obs, v, 0.1));
    }
}
BENCHMARK(bm_fisher_vector_product)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void bm_conjugate_gradient(benchmark::State& state) {
    const GaussianPolicy policy = make_policy();
    Rng rng(5);
    const Eigen::MatrixXd obs = random_obs(rng, 512);
    Eigen::VectorXd b(policy.param_count());
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.gaussian();
    const auto apply = [&](const Eigen::VectorXd& x) {
        return fisher_vector_product(policy.spec(), policy.params(), obs, x, 0.1);
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(conjugate_gradient(apply, b, 10, 1e-10));
    }
}
BENCHMARK(bm_conjugate_gradient)->Unit(benchmark::kMillisecond);

void bm_gae(benchmark::State& state) {
    Rng rng(6);
    Eigen::VectorXd rewards(60), preds(60);
    for (int i = 0; i < 60; ++i) {
        rewards[i] = rng.gaussian();
        preds[i] = rng.gaussian();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(gae(rewards, preds, 0.995, 0.97));
    }
}
BENCHMARK(bm_gae);

}  // namespace

BENCHMARK_MAIN();
