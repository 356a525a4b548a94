#include "ctrpo/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctrpo::ad {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("autodiff: " + msg);
}

}  // namespace

Var Tape::push(Node&& n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(const Eigen::MatrixXd& value) {
  require(value.allFinite(), "leaf value must be finite");
  Node n;
  n.op = Op::Leaf;
  n.value = value;
  return push(std::move(n));
}

Var Tape::constant(const Eigen::MatrixXd& value) {
  Node n;
  n.op = Op::Constant;
  n.value = value;
  return push(std::move(n));
}

Var Tape::affine(Var params, int offset, int out_dim, int in_dim, Var x) {
  const auto& p = nodes_[params.idx].value;
  const auto& xv = nodes_[x.idx].value;
  require(p.cols() == 1, "affine expects a flat parameter column vector");
  require(offset >= 0 && offset + out_dim * in_dim + out_dim <= p.rows(),
          "affine parameter slice out of range: need " +
              std::to_string(offset + out_dim * in_dim + out_dim) + ", have " +
              std::to_string(p.rows()));
  require(xv.rows() == in_dim, "affine input dim mismatch: expected " + std::to_string(in_dim) +
                                   ", got " + std::to_string(xv.rows()));
  RowMajorMap w(p.data() + offset, out_dim, in_dim);
  Node n;
  n.op = Op::Affine;
  n.a = params.idx;
  n.b = x.idx;
  n.offset = offset;
  n.out_dim = out_dim;
  n.in_dim = in_dim;
  n.value = w * xv;
  n.value.colwise() += p.col(0).segment(offset + out_dim * in_dim, out_dim);
  return push(std::move(n));
}

Var Tape::tanh(Var x) {
  Node n;
  n.op = Op::Tanh;
  n.a = x.idx;
  n.value = nodes_[x.idx].value.array().tanh();
  return push(std::move(n));
}

Var Tape::relu(Var x) {
  Node n;
  n.op = Op::Relu;
  n.a = x.idx;
  n.value = nodes_[x.idx].value.cwiseMax(0.0);
  return push(std::move(n));
}

Var Tape::exp(Var x) {
  Node n;
  n.op = Op::Exp;
  n.a = x.idx;
  n.value = nodes_[x.idx].value.array().exp();
  return push(std::move(n));
}

Var Tape::log(Var x) {
  Node n;
  n.op = Op::Log;
  n.a = x.idx;
  n.value = nodes_[x.idx].value.array().log();
  return push(std::move(n));
}

Var Tape::neg(Var x) {
  Node n;
  n.op = Op::Neg;
  n.a = x.idx;
  n.value = -nodes_[x.idx].value;
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  require(nodes_[a.idx].value.rows() == nodes_[b.idx].value.rows() &&
              nodes_[a.idx].value.cols() == nodes_[b.idx].value.cols(),
          "add shape mismatch");
  Node n;
  n.op = Op::Add;
  n.a = a.idx;
  n.b = b.idx;
  n.value = nodes_[a.idx].value + nodes_[b.idx].value;
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  require(nodes_[a.idx].value.rows() == nodes_[b.idx].value.rows() &&
              nodes_[a.idx].value.cols() == nodes_[b.idx].value.cols(),
          "sub shape mismatch");
  Node n;
  n.op = Op::Sub;
  n.a = a.idx;
  n.b = b.idx;
  n.value = nodes_[a.idx].value - nodes_[b.idx].value;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  require(nodes_[a.idx].value.rows() == nodes_[b.idx].value.rows() &&
              nodes_[a.idx].value.cols() == nodes_[b.idx].value.cols(),
          "mul shape mismatch");
  Node n;
  n.op = Op::Mul;
  n.a = a.idx;
  n.b = b.idx;
  n.value = nodes_[a.idx].value.cwiseProduct(nodes_[b.idx].value);
  return push(std::move(n));
}

Var Tape::scale(Var x, double s) {
  Node n;
  n.op = Op::Scale;
  n.a = x.idx;
  n.scalar = s;
  n.value = s * nodes_[x.idx].value;
  return push(std::move(n));
}

Var Tape::add_scalar(Var x, double s) {
  Node n;
  n.op = Op::AddScalar;
  n.a = x.idx;
  n.scalar = s;
  n.value = nodes_[x.idx].value.array() + s;
  return push(std::move(n));
}

Var Tape::broadcast_cols(Var colvec, int cols) {
  require(nodes_[colvec.idx].value.cols() == 1, "broadcast_cols expects a column vector");
  Node n;
  n.op = Op::BroadcastCols;
  n.a = colvec.idx;
  n.value = nodes_[colvec.idx].value.replicate(1, cols);
  return push(std::move(n));
}

Var Tape::slice_rows(Var colvec, int offset, int len) {
  const auto& v = nodes_[colvec.idx].value;
  require(v.cols() == 1, "slice_rows expects a column vector");
  require(offset >= 0 && offset + len <= v.rows(), "slice_rows out of range");
  Node n;
  n.op = Op::SliceRows;
  n.a = colvec.idx;
  n.offset = offset;
  n.out_dim = len;
  n.value = v.block(offset, 0, len, 1);
  return push(std::move(n));
}

Var Tape::sum_rows(Var x) {
  Node n;
  n.op = Op::SumRows;
  n.a = x.idx;
  n.value = nodes_[x.idx].value.colwise().sum();
  return push(std::move(n));
}

Var Tape::sum(Var x) {
  Node n;
  n.op = Op::Sum;
  n.a = x.idx;
  n.value = Eigen::MatrixXd::Constant(1, 1, nodes_[x.idx].value.sum());
  return push(std::move(n));
}

Eigen::MatrixXd& Tape::grad_buffer(int idx) {
  Node& n = nodes_[idx];
  if (n.op == Op::Constant) {
    // Constants absorb incoming gradients without becoming differentiable.
    constant_sink_.setZero(n.value.rows(), n.value.cols());
    return constant_sink_;
  }
  if (!n.has_adjoint) {
    n.adjoint = Eigen::MatrixXd::Zero(n.value.rows(), n.value.cols());
    n.has_adjoint = true;
  }
  return n.adjoint;
}

void Tape::backward(Var scalar_loss) {
  const Node& loss = nodes_[scalar_loss.idx];
  require(loss.value.rows() == 1 && loss.value.cols() == 1, "backward needs a scalar (1x1) node");
  if (!std::isfinite(loss.value(0, 0)))
    throw std::runtime_error("autodiff: loss is not finite: " + std::to_string(loss.value(0, 0)));
  for (auto& n : nodes_) n.has_adjoint = false;
  grad_buffer(scalar_loss.idx)(0, 0) = 1.0;
  for (int i = scalar_loss.idx; i >= 0; --i) {
    if (nodes_[i].has_adjoint) backward_node(i);
  }
}

const Eigen::MatrixXd& Tape::adjoint(Var v) const {
  const Node& n = nodes_[v.idx];
  if (!n.has_adjoint)
    throw std::logic_error("autodiff: node has no adjoint (not reached by backward pass)");
  return n.adjoint;
}

void Tape::backward_node(int idx) {
  Node& n = nodes_[idx];
  const Eigen::MatrixXd& g = n.adjoint;
  switch (n.op) {
    case Op::Leaf:
    case Op::Constant:
      return;
    case Op::Affine: {
      const Node& p = nodes_[n.a];
      const Node& x = nodes_[n.b];
      Eigen::MatrixXd& pg = grad_buffer(n.a);
      RowMajorMutMap wg(pg.data() + n.offset, n.out_dim, n.in_dim);
      wg.noalias() += g * x.value.transpose();
      pg.col(0).segment(n.offset + n.out_dim * n.in_dim, n.out_dim) += g.rowwise().sum();
      if (nodes_[n.b].op != Op::Constant) {
        RowMajorMap w(p.value.data() + n.offset, n.out_dim, n.in_dim);
        grad_buffer(n.b).noalias() += w.transpose() * g;
      }
      return;
    }
    case Op::Tanh:
      grad_buffer(n.a).array() += g.array() * (1.0 - n.value.array().square());
      return;
    case Op::Relu:
      grad_buffer(n.a).array() +=
          g.array() * (nodes_[n.a].value.array() > 0.0).cast<double>();
      return;
    case Op::Exp:
      grad_buffer(n.a).array() += g.array() * n.value.array();
      return;
    case Op::Log:
      grad_buffer(n.a).array() += g.array() / nodes_[n.a].value.array();
      return;
    case Op::Neg:
      grad_buffer(n.a) -= g;
      return;
    case Op::Add:
      grad_buffer(n.a) += g;
      grad_buffer(n.b) += g;
      return;
    case Op::Sub:
      grad_buffer(n.a) += g;
      grad_buffer(n.b) -= g;
      return;
    case Op::Mul:
      grad_buffer(n.a).array() += g.array() * nodes_[n.b].value.array();
      grad_buffer(n.b).array() += g.array() * nodes_[n.a].value.array();
      return;
    case Op::Scale:
      grad_buffer(n.a) += n.scalar * g;
      return;
    case Op::AddScalar:
      grad_buffer(n.a) += g;
      return;
    case Op::BroadcastCols:
      grad_buffer(n.a) += g.rowwise().sum();
      return;
    case Op::SliceRows:
      grad_buffer(n.a).block(n.offset, 0, n.out_dim, 1) += g;
      return;
    case Op::SumRows:
      grad_buffer(n.a).array() += g.replicate(nodes_[n.a].value.rows(), 1).array();
      return;
    case Op::Sum:
      grad_buffer(n.a).array() += g(0, 0);
      return;
  }
  throw std::logic_error("autodiff: unsupported primitive in backward pass (op tag " +
                         std::to_string(static_cast<int>(n.op)) + ")");
}

}  // namespace ctrpo::ad
