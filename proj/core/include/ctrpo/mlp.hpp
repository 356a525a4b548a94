#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ctrpo/autodiff.hpp"
#include "ctrpo/rng.hpp"

namespace ctrpo {

enum class Activation { Tanh, Relu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Feed-forward network shape. Parameters are stored flat, layer by layer:
/// W0 (row-major), b0, W1, b1, ..., with hidden activations between layers
/// and a linear output layer.
struct MlpSpec {
  int input_dim{1};
  std::vector<int> hidden_dims;
  int output_dim{1};
  Activation activation{Activation::Tanh};

  /// Throws std::invalid_argument unless all dims >= 1 and hidden_dims is
  /// non-empty.
  void validate() const;

  int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }
  int layer_in(int layer) const;
  int layer_out(int layer) const;
  /// Flat offset of layer `layer`'s weight block (bias follows the weights).
  int layer_offset(int layer) const;
  int param_count() const;

  bool operator==(const MlpSpec&) const = default;
};

/// Seeded scaled-uniform fan-in initialization: W_ij ~ U(-1/sqrt(fan_in),
/// 1/sqrt(fan_in)), biases zero. The output layer is multiplied by
/// `final_layer_scale` (policies use 0.01 so the initial mean is near zero).
Eigen::VectorXd init_mlp_params(const MlpSpec& spec, uint64_t seed,
                                double final_layer_scale = 1.0);

/// Forward pass, one observation per column. Throws on input dimension
/// mismatch, naming expected vs actual sizes.
Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::MatrixXd& input);

/// Forward pass recorded on an autodiff tape. `params` must be a leaf (or
/// any column-vector node) holding at least spec.param_count() entries
/// starting at `param_offset`.
ad::Var mlp_forward_tape(ad::Tape& tape, const MlpSpec& spec, ad::Var params, ad::Var input,
                         int param_offset = 0);

/// Per-layer forward values plus a directional (Jacobian-vector) tangent.
/// Used by the Fisher-vector product; `tangent` is the parameter
/// perturbation restricted to this network's block.
struct MlpJvp {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = input, .back() = output
  Eigen::MatrixXd output_tangent;
};
MlpJvp mlp_jvp(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params, const Eigen::MatrixXd& input,
               const Eigen::Ref<const Eigen::VectorXd>& tangent);

/// Vector-Jacobian product: accumulates d(sum(output . cotangent))/d(params)
/// into `grad_out` given the forward activations from mlp_jvp.
void mlp_vjp(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
             const std::vector<Eigen::MatrixXd>& activations, const Eigen::MatrixXd& cotangent,
             Eigen::Ref<Eigen::VectorXd> grad_out);

}  // namespace ctrpo
