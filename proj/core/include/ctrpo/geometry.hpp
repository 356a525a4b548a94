#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ctrpo {

using Point3 = Eigen::Vector3d;

struct ViolationResult {
    double d = 0.0;
    double t = 0.0;
    bool radial_violated = false;
    bool axial_violated = false;
    double cost = 0.0;
};

/// Cylindrical keep-in region around the segment from the initial hand
/// position x_h to the initial object position x_b: the hand must stay
/// within perpendicular distance r of the axis, with its axial projection
/// t in [t_min, t_max]. Each strictly violated inequality incurs cost c per
/// evaluation; cl is the per-episode discounted cost limit carried along
/// with the geometry so the optimizers can read both from one place.
class CylinderConstraint {
public:
    CylinderConstraint(Point3 x_h, Point3 x_b, double r, double t_min, double t_max, double c, double cl);

    const Point3& hand_anchor() const { return x_h_; }
    const Point3& object_anchor() const { return x_b_; }
    double radius() const { return r_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double penalty_cost() const { return c_; }
    double cost_limit() const { return cl_; }

    /// Axial parameter t of the orthogonal projection of x onto the axis
    /// line; 0 at x_h, 1 at x_b.
    double axial_parameter(const Point3& x) const;

    /// Perpendicular distance from x to the infinite axis line.
    double perpendicular_distance(const Point3& x) const;

    /// Evaluate both inequalities at x. Boundary equality counts as
    /// satisfied; cost = c * (number of violated inequalities).
    ViolationResult evaluate(const Point3& x) const;

    /// Discounted penalty sum and total violated-inequality count over a
    /// sequence of positions, discounting from gamma_c^0 at the first entry.
    std::pair<double, std::int64_t> trajectory_cost(const std::vector<Point3>& positions, double gamma_c) const;

private:
    Point3 x_h_;
    Point3 x_b_;
    Point3 axis_;
    double axis_squared_norm_;
    double r_;
    double t_min_;
    double t_max_;
    double c_;
    double cl_;
};

}  // namespace ctrpo
