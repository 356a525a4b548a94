#pragma once

#include <memory>

#include <Eigen/Dense>

#include "ctrpo/geometry.hpp"
#include "ctrpo/rng.hpp"

namespace ctrpo {

inline constexpr int kObsDim = 13;
inline constexpr int kActionDim = 4;

/// Workspace and reward shape for the point-grasper relocation task.
/// The table is the plane z = 0; distances are in meters. |reward| per step
/// is bounded by w1*D + w2*D + lift_bonus + proximity_bonus where D is the
/// workspace diameter (about 1 m with the defaults).
struct EnvParams {
    double w1 = 0.1;                // hand-to-object distance weight, pre-grasp
    double w2 = 0.5;                // object-to-goal distance weight, post-grasp
    double w3 = 0.045;              // hand-to-goal distance weight, pre-grasp
    double lift_bonus = 1.0;        // paid once, when the object first leaves the table
    double proximity_bonus = 10.0;  // paid while the carried object is inside the goal region
    double grasp_radius = 0.035;
    double goal_radius = 0.05;
    double max_speed = 0.03;  // meters per step
    double lift_height = 0.02;
    int horizon = 55;
    Point3 hand_home{0.0, 0.0, 0.55};
    double object_jitter = 0.12;   // uniform +/- range for object x,y on the table
    double goal_offset_x = 0.3;    // goal region center, offset from the object region
    double goal_jitter = 0.08;     // uniform +/- range for goal x,y around the center
    double goal_z_min = 0.15;
    double goal_z_max = 0.25;

    void validate() const;
};

/// Constraint shape parameters; the anchors come from the episode reset.
struct ConstraintCfg {
    double r = 0.1;
    double t_min = -0.1;
    double t_max = 1.1;
    double c = 0.01;
    double cl = 0.25;
};

struct EnvState {
    Point3 hand;
    Point3 object;
    Point3 goal;
    bool grasped = false;
    bool lift_paid = false;
    int step = 0;
    bool done = false;
};

using Observation = Eigen::Matrix<double, kObsDim, 1>;
using EnvAction = Eigen::Matrix<double, kActionDim, 1>;

struct StepResult {
    Observation obs;
    double reward = 0.0;
    double cost = 0.0;
    bool done = false;
    int violations = 0;
    bool success = false;
};

/// Kinematic relocation task: a point hand descends to an object on the
/// table, grasps it, and carries it to an elevated goal. The action is a
/// velocity command in units of max_speed (clamped to unit norm before
/// scaling) plus a grasp channel; grasping latches when commanded with the
/// hand within grasp_radius of the object, after which the object tracks
/// the hand rigidly. The cylindrical boundary constraint applies to the
/// hand until the grasp latches; the carry phase is unconstrained.
class Env {
public:
    Env(EnvParams params, ConstraintCfg constraint_cfg);

    /// Start a new episode. The constraint anchors are bound to the initial
    /// hand and object positions drawn here.
    Observation reset(Rng& rng);

    /// Advance one step. Throws if the episode has already terminated.
    StepResult step(const EnvAction& action);

    const EnvParams& params() const { return params_; }
    const EnvState& state() const { return state_; }
    const CylinderConstraint& constraint() const;
    int horizon() const { return params_.horizon; }
    bool success() const;

    static Observation observe(const EnvState& s);

private:
    EnvParams params_;
    ConstraintCfg constraint_cfg_;
    EnvState state_;
    // Rebuilt each reset since the anchors move with the sampled layout.
    std::unique_ptr<CylinderConstraint> constraint_;
};

}  // namespace ctrpo
