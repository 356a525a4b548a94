#pragma once

#include <Eigen/Dense>

namespace ctrpo {

/// Adam with the usual bias correction; state sized to the parameter vector
/// it is constructed for.
class Adam {
public:
    explicit Adam(Eigen::Index dim, double lr = 0.001, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    /// Apply one descent step in place given the gradient of the loss.
    void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad);

    double lr() const { return lr_; }

private:
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    Eigen::VectorXd m_;
    Eigen::VectorXd v_;
    long t_ = 0;
};

}  // namespace ctrpo
