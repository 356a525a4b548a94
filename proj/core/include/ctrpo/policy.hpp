#pragma once

#include <Eigen/Dense>

#include "ctrpo/autodiff.hpp"
#include "ctrpo/mlp.hpp"
#include "ctrpo/rng.hpp"

namespace ctrpo {

/// Diagonal Gaussian policy: an MLP maps observations to the action mean,
/// and a state-independent log standard deviation vector is appended to the
/// flat parameter vector (mean-net parameters first, then one log-std entry
/// per action dimension).
class GaussianPolicy {
public:
    GaussianPolicy(MlpSpec spec, Eigen::VectorXd params);

    /// Fresh policy with seeded mean-net weights, zero log-std.
    static GaussianPolicy init(const MlpSpec& spec, std::uint64_t seed, double final_layer_scale = 1.0);

    const MlpSpec& spec() const { return spec_; }
    const Eigen::VectorXd& params() const { return params_; }
    int obs_dim() const { return spec_.input_dim; }
    int action_dim() const { return spec_.output_dim; }
    int mean_param_count() const { return spec_.param_count(); }
    int param_count() const { return spec_.param_count() + spec_.output_dim; }

    Eigen::Map<const Eigen::VectorXd> log_std() const;

    /// Replace the full flat parameter vector.
    void set_params(const Eigen::VectorXd& params);

    /// Action means for a batch of observations (obs_dim x n -> action_dim x n).
    Eigen::MatrixXd mean(const Eigen::MatrixXd& obs) const;

    /// Per-sample log density of `actions` under the current policy, one entry
    /// per column of the batch.
    Eigen::VectorXd log_prob(const Eigen::MatrixXd& obs, const Eigen::MatrixXd& actions) const;

    /// Draw one action for a single observation.
    Eigen::VectorXd sample(const Eigen::VectorXd& obs, Rng& rng) const;

    /// Build the log-density row (1 x n) on a tape so that gradients with
    /// respect to `param_leaf` can be taken. `obs` and `actions` enter as
    /// constants.
    ad::Var log_prob_tape(ad::Tape& tape, ad::Var param_leaf, const Eigen::MatrixXd& obs,
                          const Eigen::MatrixXd& actions) const;

private:
    MlpSpec spec_;
    Eigen::VectorXd params_;
};

/// Mean KL divergence KL(old || new) over an observation batch, evaluated
/// analytically for the diagonal Gaussian family.
double mean_kl(const MlpSpec& spec, const Eigen::VectorXd& old_params, const Eigen::VectorXd& new_params,
               const Eigen::MatrixXd& obs);

/// Product of the KL Hessian (Fisher matrix, in Gauss-Newton form, exact for
/// the Gaussian family at the expansion point) with a direction `v`, plus
/// `damping * v`. `obs` holds one observation per column.
Eigen::VectorXd fisher_vector_product(const MlpSpec& spec, const Eigen::VectorXd& params,
                                      const Eigen::MatrixXd& obs, const Eigen::VectorXd& v, double damping);

}  // namespace ctrpo
