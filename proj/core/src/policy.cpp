#include "ctrpo/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace ctrpo {

using ad::Tape;
using ad::Var;

namespace {

void check_batch(const GaussianPolicy& pi, const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) {
    if (obs.rows() != pi.obs_dim())
        throw std::invalid_argument("observation batch has " + std::to_string(obs.rows()) +
                                    " rows, expected " + std::to_string(pi.obs_dim()));
    if (actions.rows() != pi.action_dim())
        throw std::invalid_argument("action batch has " + std::to_string(actions.rows()) +
                                    " rows, expected " + std::to_string(pi.action_dim()));
    if (obs.cols() != actions.cols())
        throw std::invalid_argument("observation/action batch size mismatch");
    if (obs.cols() == 0) throw std::invalid_argument("empty batch");
}

}  // namespace

GaussianPolicy::GaussianPolicy(MlpSpec spec, Eigen::VectorXd params)
    : spec_(std::move(spec)), params_(std::move(params)) {
    spec_.validate();
    if (params_.size() != param_count())
        throw std::invalid_argument("policy parameter vector has " + std::to_string(params_.size()) +
                                    " entries, expected " + std::to_string(param_count()));
}

GaussianPolicy GaussianPolicy::init(const MlpSpec& spec, std::uint64_t seed, double final_layer_scale) {
    Eigen::VectorXd params(spec.param_count() + spec.output_dim);
    params.head(spec.param_count()) = init_mlp_params(spec, seed, final_layer_scale);
    params.tail(spec.output_dim).setZero();
    return GaussianPolicy(spec, std::move(params));
}

Eigen::Map<const Eigen::VectorXd> GaussianPolicy::log_std() const {
    return Eigen::Map<const Eigen::VectorXd>(params_.data() + mean_param_count(), action_dim());
}

void GaussianPolicy::set_params(const Eigen::VectorXd& params) {
    if (params.size() != param_count())
        throw std::invalid_argument("policy parameter vector has " + std::to_string(params.size()) +
                                    " entries, expected " + std::to_string(param_count()));
    params_ = params;
}

Eigen::MatrixXd GaussianPolicy::mean(const Eigen::MatrixXd& obs) const {
    return mlp_forward(spec_, params_.head(mean_param_count()), obs);
}

Eigen::VectorXd GaussianPolicy::log_prob(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const {
    check_batch(*this, obs, actions);
    const Eigen::MatrixXd mu = mean(obs);
    const Eigen::VectorXd ls = log_std();
    const Eigen::ArrayXd inv_sigma = (-ls.array()).exp();
    const Eigen::ArrayXXd z = (actions - mu).array().colwise() * inv_sigma;
    const double log_norm = -0.5 * action_dim() * std::log(2.0 * std::numbers::pi) - ls.sum();
    return (log_norm - 0.5 * z.square().colwise().sum()).transpose();
}

Eigen::VectorXd GaussianPolicy::sample(const Eigen::VectorXd& obs, Rng& rng) const {
    const Eigen::MatrixXd mu = mean(obs);
    Eigen::VectorXd action(action_dim());
    const Eigen::VectorXd ls = log_std();
    for (int i = 0; i < action_dim(); ++i) action[i] = mu(i, 0) + std::exp(ls[i]) * rng.gaussian();
    return action;
}

Var GaussianPolicy::log_prob_tape(Tape& tape, Var param_leaf, const Eigen::MatrixXd& obs,
                                  const Eigen::MatrixXd& actions) const {
    check_batch(*this, obs, actions);
    const int n = static_cast<int>(obs.cols());
    const Var mu = mlp_forward_tape(tape, spec_, param_leaf, tape.constant(obs), 0);
    const Var ls = tape.broadcast_cols(tape.slice_rows(param_leaf, mean_param_count(), action_dim()), n);
    const Var z = tape.mul(tape.sub(tape.constant(actions), mu), tape.exp(tape.neg(ls)));
    const Var quad = tape.sum_rows(tape.mul(z, z));
    const Var body = tape.sub(tape.scale(quad, -0.5), tape.sum_rows(ls));
    return tape.add_scalar(body, -0.5 * action_dim() * std::log(2.0 * std::numbers::pi));
}

double mean_kl(const MlpSpec& spec, const Eigen::VectorXd& old_params, const Eigen::VectorXd& new_params,
               const Eigen::MatrixXd& obs) {
    const int mean_count = spec.param_count();
    const int a = spec.output_dim;
    if (old_params.size() != mean_count + a || new_params.size() != mean_count + a)
        throw std::invalid_argument("parameter vector size mismatch in mean_kl");
    if (obs.cols() == 0) throw std::invalid_argument("empty batch in mean_kl");

    const Eigen::MatrixXd mu_old = mlp_forward(spec, old_params.head(mean_count), obs);
    const Eigen::MatrixXd mu_new = mlp_forward(spec, new_params.head(mean_count), obs);
    const Eigen::ArrayXd ls_old = old_params.tail(a).array();
    const Eigen::ArrayXd ls_new = new_params.tail(a).array();
    const Eigen::ArrayXd inv_var_new = (-2.0 * ls_new).exp();

    const double fixed = (ls_new - ls_old).sum() - 0.5 * a +
                         0.5 * ((2.0 * ls_old).exp() * inv_var_new).sum();
    const double quad =
        0.5 * ((mu_old - mu_new).array().square().colwise() * inv_var_new).colwise().sum().mean();
    return fixed + quad;
}

Eigen::VectorXd fisher_vector_product(const MlpSpec& spec, const Eigen::VectorXd& params,
                                      const Eigen::MatrixXd& obs, const Eigen::VectorXd& v, double damping) {
    const int mean_count = spec.param_count();
    const int a = spec.output_dim;
    if (params.size() != mean_count + a)
        throw std::invalid_argument("parameter vector size mismatch in fisher_vector_product");
    if (v.size() != params.size())
        throw std::invalid_argument("direction size mismatch in fisher_vector_product");
    if (obs.cols() == 0) throw std::invalid_argument("empty batch in fisher_vector_product");

    const Eigen::ArrayXd inv_var = (-2.0 * params.tail(a).array()).exp();
    const MlpJvp jvp = mlp_jvp(spec, params.head(mean_count), obs, v.head(mean_count));
    const Eigen::MatrixXd cotangent =
        (jvp.output_tangent.array().colwise() * inv_var).matrix() / static_cast<double>(obs.cols());

    Eigen::VectorXd out = Eigen::VectorXd::Zero(params.size());
    mlp_vjp(spec, params.head(mean_count), jvp.activations, cotangent, out.head(mean_count));
    out.tail(a) = 2.0 * v.tail(a);
    out += damping * v;
    return out;
}

}  // namespace ctrpo
