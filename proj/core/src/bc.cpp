#include "ctrpo/bc.hpp"

#include <cmath>
#include <stdexcept>

#include "ctrpo/adam.hpp"
#include "ctrpo/autodiff.hpp"

namespace ctrpo {

using ad::Tape;
using ad::Var;

namespace {

void flatten_demos(const std::vector<DemoEpisode>& demos, Eigen::MatrixXd& obs, Eigen::MatrixXd& actions) {
    if (demos.empty()) throw std::invalid_argument("behavior cloning needs at least one demo");
    Eigen::Index total = 0;
    for (const DemoEpisode& d : demos) {
        if (d.obs.cols() != d.actions.cols()) throw std::invalid_argument("demo episode length mismatch");
        total += d.obs.cols();
    }
    obs.resize(kObsDim, total);
    actions.resize(kActionDim, total);
    Eigen::Index at = 0;
    for (const DemoEpisode& d : demos) {
        obs.middleCols(at, d.obs.cols()) = d.obs;
        actions.middleCols(at, d.actions.cols()) = d.actions;
        at += d.obs.cols();
    }
}

}  // namespace

double demo_log_likelihood(const MlpSpec& spec, const Eigen::VectorXd& params,
                           const std::vector<DemoEpisode>& demos) {
    Eigen::MatrixXd obs, actions;
    flatten_demos(demos, obs, actions);
    return GaussianPolicy(spec, params).log_prob(obs, actions).mean();
}

BcResult behavior_clone(const GaussianPolicy& policy, const std::vector<DemoEpisode>& demos, double lr,
                        int epochs) {
    if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
    Eigen::MatrixXd obs, actions;
    flatten_demos(demos, obs, actions);
    const Eigen::Index n = obs.cols();

    BcResult result;
    result.params = policy.params();
    result.demo_logp_before = GaussianPolicy(policy.spec(), result.params).log_prob(obs, actions).mean();

    Adam opt(result.params.size(), lr);
    const int mean_count = policy.mean_param_count();
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const GaussianPolicy current(policy.spec(), result.params);
        Tape tape;
        const Var theta = tape.leaf(result.params);
        const Var logp = current.log_prob_tape(tape, theta, obs, actions);
        const Var loss = tape.scale(tape.sum(logp), -1.0 / static_cast<double>(n));
        tape.backward(loss);
        if (!std::isfinite(tape.value(loss)(0, 0)))
            throw std::runtime_error("behavior cloning diverged at epoch " + std::to_string(epoch));
        Eigen::VectorXd grad = tape.adjoint(theta);
        grad.tail(grad.size() - mean_count).setZero();  // keep exploration noise fixed
        opt.step(result.params, grad);
    }

    result.demo_logp_after = GaussianPolicy(policy.spec(), result.params).log_prob(obs, actions).mean();
    return result;
}

}  // namespace ctrpo
