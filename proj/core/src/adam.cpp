#include "ctrpo/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ctrpo {

Adam::Adam(Eigen::Index dim, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Eigen::VectorXd::Zero(dim)),
      v_(Eigen::VectorXd::Zero(dim)) {
    if (dim < 1) throw std::invalid_argument("parameter dimension must be positive");
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("betas must lie in [0, 1)");
}

void Adam::step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw std::invalid_argument("parameter/gradient size mismatch");
    if (!grad.allFinite()) throw std::runtime_error("non-finite gradient in Adam step");
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    params -= (lr_ / correction1) * m_.cwiseQuotient(((v_ / correction2).cwiseSqrt().array() + eps_).matrix());
}

}  // namespace ctrpo
