#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "ctrpo/bc.hpp"
#include "ctrpo/expert.hpp"
#include "ctrpo/rng.hpp"

using namespace ctrpo;

namespace {

GaussianPolicy fresh_policy(std::uint64_t seed) {
    return GaussianPolicy::init(MlpSpec{kObsDim, {32, 32}, kActionDim}, seed, 0.01);
}

std::vector<DemoEpisode> expert_demos(int n, std::uint64_t seed) {
    Env env(EnvParams{}, ConstraintCfg{});
    return collect_demos(env, n, seed);
}

}  // namespace

TEST_SUITE("bc") {

TEST_CASE("zero epochs leave the parameters untouched") {
    const GaussianPolicy policy = fresh_policy(701);
    const auto demos = expert_demos(2, 701);
    const BcResult res = behavior_clone(policy, demos, 1e-3, 0);
    CHECK((res.params.array() == policy.params().array()).all());
    CHECK(res.demo_logp_before == res.demo_logp_after);
    CHECK(res.demo_logp_before ==
          doctest::Approx(demo_log_likelihood(policy.spec(), policy.params(), demos)).epsilon(1e-15));
}

TEST_CASE("a single state-action pair is fit almost exactly") {
    const GaussianPolicy policy = fresh_policy(702);
    Rng rng(Rng::stream(702, 9, 0));

    DemoEpisode demo;
    demo.obs.resize(kObsDim, 1);
    demo.actions.resize(kActionDim, 1);
    for (int i = 0; i < kObsDim; ++i) demo.obs(i, 0) = rng.gaussian() * 0.3;
    demo.actions.col(0) << 0.4, -0.3, 0.2, 0.6;

    const BcResult res = behavior_clone(policy, {demo}, 1e-2, 2000);
    const GaussianPolicy fitted(policy.spec(), res.params);
    const Eigen::VectorXd mean = fitted.mean(demo.obs).col(0);
    CHECK((mean - demo.actions.col(0)).norm() < 0.05);
    CHECK(res.demo_logp_after > res.demo_logp_before);
}

TEST_CASE("training on expert demos improves held-out likelihood") {
    const GaussianPolicy policy = fresh_policy(703);
    auto demos = expert_demos(25, 703);
    const std::vector<DemoEpisode> holdout(demos.begin() + 20, demos.end());
    demos.resize(20);

    const double before = demo_log_likelihood(policy.spec(), policy.params(), holdout);
    const BcResult res = behavior_clone(policy, demos, 1e-3, 300);
    const double after = demo_log_likelihood(policy.spec(), res.params, holdout);

    CHECK(res.demo_logp_after > res.demo_logp_before);
    CHECK(after > before);
}

TEST_CASE("the log-std entries never move") {
    const GaussianPolicy policy = fresh_policy(704);
    const auto demos = expert_demos(3, 704);
    const BcResult res = behavior_clone(policy, demos, 1e-2, 100);

    const int mean_count = policy.mean_param_count();
    const Eigen::VectorXd tail_before = policy.params().tail(kActionDim);
    const Eigen::VectorXd tail_after = res.params.tail(kActionDim);
    CHECK((tail_before.array() == tail_after.array()).all());
    // The mean parameters did move.
    CHECK((res.params.head(mean_count) - policy.params().head(mean_count)).norm() > 0.0);
}

TEST_CASE("input validation") {
    const GaussianPolicy policy = fresh_policy(705);
    const auto demos = expert_demos(1, 705);
    CHECK_THROWS_AS(behavior_clone(policy, {}, 1e-3, 10), std::invalid_argument);
    CHECK_THROWS_AS(behavior_clone(policy, demos, 1e-3, -1), std::invalid_argument);

    DemoEpisode bad = demos[0];
    bad.actions = bad.actions.leftCols(bad.actions.cols() - 1).eval();
    CHECK_THROWS_AS(behavior_clone(policy, {bad}, 1e-3, 10), std::invalid_argument);
    CHECK_THROWS_AS(demo_log_likelihood(policy.spec(), policy.params(), {bad}), std::invalid_argument);
}

}  // TEST_SUITE
