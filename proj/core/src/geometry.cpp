#include "ctrpo/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctrpo {

CylinderConstraint::CylinderConstraint(Point3 x_h, Point3 x_b, double r, double t_min, double t_max, double c,
                                       double cl)
    : x_h_(std::move(x_h)),
      x_b_(std::move(x_b)),
      axis_(x_b_ - x_h_),
      axis_squared_norm_(axis_.squaredNorm()),
      r_(r),
      t_min_(t_min),
      t_max_(t_max),
      c_(c),
      cl_(cl) {
    if (!x_h_.allFinite() || !x_b_.allFinite()) throw std::invalid_argument("constraint anchors must be finite");
    if (axis_.norm() < 1e-12) throw std::invalid_argument("degenerate constraint axis: anchors coincide");
    if (!(r_ > 0.0)) throw std::invalid_argument("boundary radius must be positive");
    if (!(t_min_ < t_max_)) throw std::invalid_argument("t_min must be below t_max");
    if (!(c_ >= 0.0)) throw std::invalid_argument("penalty cost must be non-negative");
    if (!(cl_ >= 0.0)) throw std::invalid_argument("cost limit must be non-negative");
}

double CylinderConstraint::axial_parameter(const Point3& x) const {
    return (x - x_h_).dot(axis_) / axis_squared_norm_;
}

double CylinderConstraint::perpendicular_distance(const Point3& x) const {
    return axis_.cross(x_h_ - x).norm() / std::sqrt(axis_squared_norm_);
}

ViolationResult CylinderConstraint::evaluate(const Point3& x) const {
    ViolationResult res;
    res.d = perpendicular_distance(x);
    res.t = axial_parameter(x);
    res.radial_violated = res.d > r_;
    res.axial_violated = res.t < t_min_ || res.t > t_max_;
    res.cost = c_ * (static_cast<int>(res.radial_violated) + static_cast<int>(res.axial_violated));
    return res;
}

std::pair<double, std::int64_t> CylinderConstraint::trajectory_cost(const std::vector<Point3>& positions,
                                                                    double gamma_c) const {
    if (!(gamma_c > 0.0 && gamma_c <= 1.0))
        throw std::invalid_argument("gamma_c must lie in (0, 1], got " + std::to_string(gamma_c));
    double discounted = 0.0;
    std::int64_t count = 0;
    double discount = 1.0;
    for (const Point3& x : positions) {
        const ViolationResult res = evaluate(x);
        discounted += discount * res.cost;
        count += static_cast<int>(res.radial_violated) + static_cast<int>(res.axial_violated);
        discount *= gamma_c;
    }
    return {discounted, count};
}

}  // namespace ctrpo
