#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ctrpo/env.hpp"
#include "ctrpo/expert.hpp"
#include "ctrpo/rng.hpp"

using ctrpo::ConstraintCfg;
using ctrpo::Env;
using ctrpo::EnvAction;
using ctrpo::EnvParams;
using ctrpo::Point3;
using ctrpo::Rng;

namespace {

EnvAction make_action(double x, double y, double z, double grasp = 0.0) {
    EnvAction a;
    a << x, y, z, grasp;
    return a;
}

// Walks straight toward a target at full speed until within eps.
void drive_to(Env& env, const Point3& target, double grasp, int max_steps = 400) {
    for (int i = 0; i < max_steps; ++i) {
        const Point3 delta = target - env.state().hand;
        if (delta.norm() < 1e-9) return;
        Point3 v = delta / env.params().max_speed;
        if (v.norm() > 1.0) v.normalize();
        env.step(make_action(v.x(), v.y(), v.z(), grasp));
        if (delta.norm() <= env.params().max_speed) return;
    }
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("reset samples the documented layout") {
    const EnvParams p{};
    Env env(p, ConstraintCfg{});
    Rng rng(401);
    for (int e = 0; e < 100; ++e) {
        const auto obs = env.reset(rng);
        const auto& s = env.state();
        CHECK(s.hand == p.hand_home);
        CHECK(std::abs(s.object.x()) <= p.object_jitter);
        CHECK(std::abs(s.object.y()) <= p.object_jitter);
        CHECK(s.object.z() == 0.0);
        CHECK(std::abs(s.goal.x() - p.goal_offset_x) <= p.goal_jitter);
        CHECK(std::abs(s.goal.y()) <= p.goal_jitter);
        CHECK(s.goal.z() >= p.goal_z_min);
        CHECK(s.goal.z() <= p.goal_z_max);
        CHECK_FALSE(s.grasped);
        CHECK(obs == Env::observe(s));

        // constraint is anchored to this episode's layout
        CHECK(env.constraint().hand_anchor() == s.hand);
        CHECK(env.constraint().object_anchor() == s.object);
    }
}

TEST_CASE("observation packs the documented components") {
    ctrpo::EnvState s;
    s.hand = Point3(0.1, 0.2, 0.3);
    s.object = Point3(-0.1, 0.0, 0.05);
    s.goal = Point3(0.0, 0.1, 0.2);
    s.grasped = true;
    const auto obs = Env::observe(s);
    CHECK(obs.segment<3>(0) == s.hand);
    CHECK(obs[3] == 1.0);
    CHECK(obs.segment<3>(4) == (s.hand - s.object));
    CHECK(obs.segment<3>(7) == (s.hand - s.goal));
    CHECK(obs.segment<3>(10) == (s.object - s.goal));
}

TEST_CASE("stepping before reset or after termination throws") {
    Env env(EnvParams{}, ConstraintCfg{});
    CHECK_THROWS_AS((void)env.step(make_action(0, 0, 0)), std::logic_error);

    Rng rng(402);
    env.reset(rng);
    for (int i = 0; i < env.params().horizon; ++i) (void)env.step(make_action(0, 0, 0));
    CHECK(env.state().done);
    CHECK_THROWS_AS((void)env.step(make_action(0, 0, 0)), std::logic_error);
}

TEST_CASE("non-finite actions are rejected") {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(403);
    env.reset(rng);
    CHECK_THROWS_AS((void)env.step(make_action(std::nan(""), 0, 0)), std::invalid_argument);
}

TEST_CASE("velocity commands are clamped to max speed") {
    Env env(EnvParams{}, ConstraintCfg{});
    const double speed = env.params().max_speed;
    Rng rng(404);
    env.reset(rng);
    const Point3 before = env.state().hand;
    env.step(make_action(10.0, 0.0, 0.0));
    CHECK((env.state().hand - before).norm() == doctest::Approx(speed).epsilon(1e-12));
    CHECK(env.state().hand.x() - before.x() == doctest::Approx(speed).epsilon(1e-12));

    // sub-unit commands scale linearly
    const Point3 mid = env.state().hand;
    env.step(make_action(0.5, 0.0, 0.0));
    CHECK((env.state().hand - mid).norm() == doctest::Approx(0.5 * speed).epsilon(1e-12));
}

TEST_CASE("pre-grasp reward tracks hand-object and hand-goal distance and the constraint") {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(405);
    env.reset(rng);
    const auto res = env.step(make_action(1.0, 0.0, 0.0));
    const double d_ho = (env.state().hand - env.state().object).norm();
    const double d_hg = (env.state().hand - env.state().goal).norm();
    const auto& p = env.params();
    CHECK(res.reward == doctest::Approx(-p.w1 * d_ho - p.w3 * d_hg).epsilon(1e-12));

    const auto vr = env.constraint().evaluate(env.state().hand);
    CHECK(res.cost == vr.cost);
    CHECK(res.violations ==
          static_cast<int>(vr.radial_violated) + static_cast<int>(vr.axial_violated));
}

TEST_CASE("grasping latches within the grasp radius and attaches the object") {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(406);
    env.reset(rng);
    const Point3 object = env.state().object;

    // approach without grasping: nothing latches even in contact
    drive_to(env, object, 0.0);
    CHECK_FALSE(env.state().grasped);
    REQUIRE((env.state().hand - object).norm() <= env.params().grasp_radius);

    // now command a grasp in place
    env.step(make_action(0, 0, 0, 1.0));
    CHECK(env.state().grasped);

    // the object moves rigidly with the hand from here on
    env.step(make_action(0, 0, 1.0, 0.0));
    CHECK(env.state().object == env.state().hand);
    CHECK(env.state().hand.z() > 0.0);
}

TEST_CASE("grasp is ignored outside the grasp radius") {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(407);
    env.reset(rng);
    for (int i = 0; i < 3; ++i) env.step(make_action(0, 0, 1.0, 1.0));  // fly up, far from object
    CHECK_FALSE(env.state().grasped);
}

TEST_CASE("post-grasp reward pays distance, one lift bonus, and proximity") {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(408);
    env.reset(rng);
    const Point3 object = env.state().object;
    drive_to(env, object, 1.0);
    REQUIRE(env.state().grasped);

    // first move that lifts the object above lift_height pays the bonus once
    const auto lift1 = env.step(make_action(0, 0, 1.0, 0.0));
    const double d_og1 = (env.state().object - env.state().goal).norm();
    CHECK(env.state().object.z() > env.params().lift_height);
    CHECK(lift1.reward == doctest::Approx(-0.5 * d_og1 + 1.0).epsilon(1e-9));
    CHECK(lift1.cost == 0.0);

    const auto lift2 = env.step(make_action(0, 0, 1.0, 0.0));
    const double d_og2 = (env.state().object - env.state().goal).norm();
    CHECK(lift2.reward == doctest::Approx(-0.5 * d_og2).epsilon(1e-9));
}

TEST_CASE("carrying the object into the goal region succeeds and terminates") {
    Env env(EnvParams{}, ConstraintCfg{});
    Rng rng(409);
    env.reset(rng);
    drive_to(env, env.state().object, 1.0);
    REQUIRE(env.state().grasped);

    const Point3 goal = env.state().goal;
    bool success = false;
    double final_reward = 0.0;
    for (int i = 0; i < 200 && !env.state().done; ++i) {
        const Point3 delta = goal - env.state().hand;
        Point3 v = delta / env.params().max_speed;
        if (v.norm() > 1.0) v.normalize();
        const auto res = env.step(make_action(v.x(), v.y(), v.z(), 0.0));
        success = res.success;
        final_reward = res.reward;
    }
    CHECK(success);
    CHECK(env.state().done);
    const double d_og = (env.state().object - env.state().goal).norm();
    CHECK(d_og < env.params().goal_radius);
    // proximity bonus is part of the terminal reward
    CHECK(final_reward >= 10.0 - 0.5 * d_og - 1e-9);
}

TEST_CASE("constraint cost applies only until the grasp") {
    // Tight cylinder: one sideways step from home leaves the tube.
    ConstraintCfg tight;
    tight.r = 0.01;
    Env env(EnvParams{}, tight);
    Rng rng(410);
    env.reset(rng);

    const auto before = env.step(make_action(1.0, 0.0, 0.0, 0.0));
    CHECK(before.cost > 0.0);
    CHECK(before.violations > 0);

    // A grasped policy pays no constraint cost even far outside the cylinder.
    Env env2(EnvParams{}, tight);
    env2.reset(rng);
    drive_to(env2, env2.state().object, 1.0);
    REQUIRE(env2.state().grasped);
    const auto after = env2.step(make_action(0, 0, 1.0, 0.0));
    CHECK(after.cost == 0.0);
    CHECK(after.violations == 0);
}

TEST_CASE("identical seeds reproduce identical episodes") {
    Env a(EnvParams{}, ConstraintCfg{});
    Env b(EnvParams{}, ConstraintCfg{});
    Rng ra = Rng::stream(7, 3, 11);
    Rng rb = Rng::stream(7, 3, 11);
    const auto oa = a.reset(ra);
    const auto ob = b.reset(rb);
    CHECK(oa == ob);
    for (int i = 0; i < 20; ++i) {
        const auto sa = a.step(make_action(0.3, -0.2, 0.1, 1.0));
        const auto sb = b.step(make_action(0.3, -0.2, 0.1, 1.0));
        CHECK(sa.obs == sb.obs);
        CHECK(sa.reward == sb.reward);
        CHECK(sa.cost == sb.cost);
    }
}

TEST_CASE("parameter validation rejects nonsense") {
    EnvParams p;
    p.horizon = 0;
    CHECK_THROWS_AS(Env(p, ConstraintCfg{}), std::invalid_argument);
    EnvParams q;
    q.max_speed = 0.0;
    CHECK_THROWS_AS(Env(q, ConstraintCfg{}), std::invalid_argument);
    EnvParams r;
    r.goal_z_min = -0.1;
    CHECK_THROWS_AS(Env(r, ConstraintCfg{}), std::invalid_argument);
}

TEST_CASE("scripted expert succeeds on 500 episodes without violations") {
    Env env(EnvParams{}, ConstraintCfg{});
    int successes = 0;
    std::int64_t violations = 0;
    for (int e = 0; e < 500; ++e) {
        Rng rng = Rng::stream(77, 0, static_cast<uint64_t>(e));
        env.reset(rng);
        while (!env.state().done) {
            const auto res = env.step(ctrpo::expert_action(env.state(), env.params()));
            violations += res.violations;
            if (res.success) ++successes;
        }
    }
    CHECK(successes == 500);
    CHECK(violations == 0);
}

TEST_CASE("demo collection round-trips through csv exactly") {
    Env env(EnvParams{}, ConstraintCfg{});
    const auto demos = ctrpo::collect_demos(env, 6, 99);
    REQUIRE(demos.size() == 6);
    for (const auto& d : demos) {
        CHECK(d.obs.cols() == d.actions.cols());
        CHECK(d.obs.rows() == ctrpo::kObsDim);
        CHECK(d.actions.rows() == ctrpo::kActionDim);
        CHECK(d.obs.cols() > 0);
    }

    const std::string path =
        (std::filesystem::temp_directory_path() / "ctrpo_demo_roundtrip.csv").string();
    ctrpo::write_demos(path, demos);
    const auto back = ctrpo::read_demos(path);
    REQUIRE(back.size() == demos.size());
    for (std::size_t i = 0; i < demos.size(); ++i) {
        CHECK((demos[i].obs.array() == back[i].obs.array()).all());
        CHECK((demos[i].actions.array() == back[i].actions.array()).all());
    }
    std::filesystem::remove(path);
}

TEST_CASE("demo collection is deterministic in the seed") {
    Env env(EnvParams{}, ConstraintCfg{});
    const auto a = ctrpo::collect_demos(env, 4, 123);
    const auto b = ctrpo::collect_demos(env, 4, 123);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((a[i].obs.array() == b[i].obs.array()).all());
}

}  // TEST_SUITE
