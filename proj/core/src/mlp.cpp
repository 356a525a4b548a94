#include "ctrpo/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace ctrpo {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& x, Activation a) {
  if (a == Activation::Tanh) return x.array().tanh();
  return x.cwiseMax(0.0);
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation '" + s + "' (expected tanh or relu)");
}

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("MlpSpec: input_dim and output_dim must be >= 1");
  if (hidden_dims.empty()) throw std::invalid_argument("MlpSpec: hidden_dims must be non-empty");
  for (int h : hidden_dims)
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
}

int MlpSpec::layer_in(int layer) const {
  return layer == 0 ? input_dim : hidden_dims[layer - 1];
}

int MlpSpec::layer_out(int layer) const {
  return layer == num_layers() - 1 ? output_dim : hidden_dims[layer];
}

int MlpSpec::layer_offset(int layer) const {
  int off = 0;
  for (int l = 0; l < layer; ++l) off += layer_out(l) * layer_in(l) + layer_out(l);
  return off;
}

int MlpSpec::param_count() const { return layer_offset(num_layers()); }

Eigen::VectorXd init_mlp_params(const MlpSpec& spec, uint64_t seed, double final_layer_scale) {
  spec.validate();
  Eigen::VectorXd params = Eigen::VectorXd::Zero(spec.param_count());
  Rng rng(seed);
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int in = spec.layer_in(l), out = spec.layer_out(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    const double scale = (l == spec.num_layers() - 1) ? final_layer_scale : 1.0;
    double* w = params.data() + spec.layer_offset(l);
    for (int i = 0; i < out * in; ++i) w[i] = scale * rng.uniform(-bound, bound);
    // biases stay zero
  }
  return params;
}

Eigen::MatrixXd mlp_forward(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::MatrixXd& input) {
  if (input.rows() != spec.input_dim)
    throw std::invalid_argument("mlp_forward: input dim mismatch: expected " +
                                std::to_string(spec.input_dim) + ", got " +
                                std::to_string(input.rows()));
  if (params.size() < spec.param_count())
    throw std::invalid_argument("mlp_forward: parameter vector too short: expected >= " +
                                std::to_string(spec.param_count()) + ", got " +
                                std::to_string(params.size()));
  if (!input.allFinite()) throw std::invalid_argument("mlp_forward: non-finite input");
  Eigen::MatrixXd x = input;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int in = spec.layer_in(l), out = spec.layer_out(l);
    const int off = spec.layer_offset(l);
    RowMajorMap w(params.data() + off, out, in);
    Eigen::MatrixXd y = w * x;
    y.colwise() += params.segment(off + out * in, out);
    x = (l == spec.num_layers() - 1) ? y : apply_activation(y, spec.activation);
  }
  return x;
}

ad::Var mlp_forward_tape(ad::Tape& tape, const MlpSpec& spec, ad::Var params, ad::Var input,
                         int param_offset) {
  ad::Var x = input;
  for (int l = 0; l < spec.num_layers(); ++l) {
    x = tape.affine(params, param_offset + spec.layer_offset(l), spec.layer_out(l),
                    spec.layer_in(l), x);
    if (l != spec.num_layers() - 1)
      x = spec.activation == Activation::Tanh ? tape.tanh(x) : tape.relu(x);
  }
  return x;
}

MlpJvp mlp_jvp(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params, const Eigen::MatrixXd& input,
               const Eigen::Ref<const Eigen::VectorXd>& tangent) {
  if (tangent.size() < spec.param_count())
    throw std::invalid_argument("mlp_jvp: tangent length mismatch: expected >= " +
                                std::to_string(spec.param_count()) + ", got " +
                                std::to_string(tangent.size()));
  MlpJvp out;
  out.activations.reserve(spec.num_layers() + 1);
  out.activations.push_back(input);
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(input.rows(), input.cols());
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int in = spec.layer_in(l), out_dim = spec.layer_out(l);
    const int off = spec.layer_offset(l);
    RowMajorMap w(params.data() + off, out_dim, in);
    RowMajorMap dw(tangent.data() + off, out_dim, in);
    const Eigen::MatrixXd& x = out.activations.back();
    Eigen::MatrixXd y = w * x;
    y.colwise() += params.segment(off + out_dim * in, out_dim);
    Eigen::MatrixXd dy = w * dx + dw * x;
    dy.colwise() += tangent.segment(off + out_dim * in, out_dim);
    if (l == spec.num_layers() - 1) {
      out.activations.push_back(y);
      out.output_tangent = std::move(dy);
    } else if (spec.activation == Activation::Tanh) {
      Eigen::MatrixXd a = y.array().tanh();
      dx = dy.array() * (1.0 - a.array().square());
      out.activations.push_back(std::move(a));
    } else {
      Eigen::MatrixXd a = y.cwiseMax(0.0);
      dx = dy.array() * (y.array() > 0.0).cast<double>();
      out.activations.push_back(std::move(a));
    }
  }
  return out;
}

void mlp_vjp(const MlpSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
             const std::vector<Eigen::MatrixXd>& activations, const Eigen::MatrixXd& cotangent,
             Eigen::Ref<Eigen::VectorXd> grad_out) {
  Eigen::MatrixXd g = cotangent;
  for (int l = spec.num_layers() - 1; l >= 0; --l) {
    const int in = spec.layer_in(l), out_dim = spec.layer_out(l);
    const int off = spec.layer_offset(l);
    const Eigen::MatrixXd& x = activations[l];
    RowMajorMutMap wg(grad_out.data() + off, out_dim, in);
    wg.noalias() += g * x.transpose();
    grad_out.segment(off + out_dim * in, out_dim) += g.rowwise().sum();
    if (l > 0) {
      RowMajorMap w(params.data() + off, out_dim, in);
      Eigen::MatrixXd gx = w.transpose() * g;
      // activations[l] holds the post-activation value of hidden layer l-1
      if (spec.activation == Activation::Tanh)
        g = gx.array() * (1.0 - x.array().square());
      else
        g = gx.array() * (x.array() > 0.0).cast<double>();
    }
  }
}

}  // namespace ctrpo
