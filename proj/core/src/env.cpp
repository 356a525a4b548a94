#include "ctrpo/env.hpp"

#include <cmath>
#include <stdexcept>

namespace ctrpo {

void EnvParams::validate() const {
    if (!(w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0 && lift_bonus >= 0.0 && proximity_bonus >= 0.0))
        throw std::invalid_argument("reward weights must be non-negative");
    if (!(grasp_radius > 0.0 && goal_radius > 0.0 && max_speed > 0.0 && lift_height > 0.0))
        throw std::invalid_argument("radii, speed, and lift height must be positive");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (!hand_home.allFinite()) throw std::invalid_argument("hand home must be finite");
    if (!std::isfinite(goal_offset_x)) throw std::invalid_argument("goal offset must be finite");
    if (!(object_jitter >= 0.0 && goal_jitter >= 0.0)) throw std::invalid_argument("jitter must be non-negative");
    if (!(goal_z_min > 0.0 && goal_z_min <= goal_z_max)) throw std::invalid_argument("bad goal height range");
}

Env::Env(EnvParams params, ConstraintCfg constraint_cfg)
    : params_(std::move(params)), constraint_cfg_(constraint_cfg) {
    params_.validate();
}

Observation Env::reset(Rng& rng) {
    state_ = EnvState{};
    state_.hand = params_.hand_home;
    state_.object = Point3(rng.uniform(-params_.object_jitter, params_.object_jitter),
                           rng.uniform(-params_.object_jitter, params_.object_jitter), 0.0);
    state_.goal = Point3(params_.goal_offset_x + rng.uniform(-params_.goal_jitter, params_.goal_jitter),
                         rng.uniform(-params_.goal_jitter, params_.goal_jitter),
                         rng.uniform(params_.goal_z_min, params_.goal_z_max));
    constraint_ = std::make_unique<CylinderConstraint>(state_.hand, state_.object, constraint_cfg_.r,
                                                       constraint_cfg_.t_min, constraint_cfg_.t_max,
                                                       constraint_cfg_.c, constraint_cfg_.cl);
    return observe(state_);
}

const CylinderConstraint& Env::constraint() const {
    if (!constraint_) throw std::logic_error("constraint queried before reset");
    return *constraint_;
}

bool Env::success() const {
    return state_.grasped && (state_.object - state_.goal).norm() < params_.goal_radius;
}

StepResult Env::step(const EnvAction& action) {
    if (!constraint_) throw std::logic_error("step called before reset");
    if (state_.done) throw std::logic_error("step called on terminal state");
    if (!action.allFinite()) throw std::invalid_argument("non-finite action");

    Point3 v = action.head<3>();
    const double speed = v.norm();
    if (speed > 1.0) v /= speed;
    state_.hand += v * params_.max_speed;

    if (!state_.grasped && action[3] > 0.0 &&
        (state_.hand - state_.object).norm() <= params_.grasp_radius) {
        state_.grasped = true;
    }
    if (state_.grasped) state_.object = state_.hand;
    state_.step += 1;

    StepResult res;
    if (state_.grasped) {
        res.reward = -params_.w2 * (state_.object - state_.goal).norm();
        if (!state_.lift_paid && state_.object.z() > params_.lift_height) {
            res.reward += params_.lift_bonus;
            state_.lift_paid = true;
        }
        if ((state_.object - state_.goal).norm() < params_.goal_radius) res.reward += params_.proximity_bonus;
    } else {
        res.reward = -params_.w1 * (state_.hand - state_.object).norm() -
                     params_.w3 * (state_.hand - state_.goal).norm();
        const ViolationResult vr = constraint_->evaluate(state_.hand);
        res.cost = vr.cost;
        res.violations = static_cast<int>(vr.radial_violated) + static_cast<int>(vr.axial_violated);
    }

    res.success = success();
    state_.done = res.success || state_.step >= params_.horizon;
    res.done = state_.done;
    res.obs = observe(state_);
    return res;
}

Observation Env::observe(const EnvState& s) {
    Observation obs;
    obs.segment<3>(0) = s.hand;
    obs[3] = s.grasped ? 1.0 : 0.0;
    obs.segment<3>(4) = s.hand - s.object;
    obs.segment<3>(7) = s.hand - s.goal;
    obs.segment<3>(10) = s.object - s.goal;
    return obs;
}

}  // namespace ctrpo
