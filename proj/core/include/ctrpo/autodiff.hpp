#pragma once

#include <Eigen/Core>
#include <vector>

namespace ctrpo::ad {

/// Handle to a node on a Tape. Cheap to copy; only valid for the tape that
/// produced it.
struct Var {
  int idx{-1};
};

/// Reverse-mode automatic differentiation over a small fixed set of
/// matrix-valued primitives: affine layers (weights sliced out of a flat
/// parameter vector), tanh, relu, exp, log, elementwise add/sub/mul,
/// scalar scale/shift, row slicing, column broadcast and summations.
///
/// Values are dense matrices; a column is one sample, so a whole batch is
/// differentiated in a single backward sweep. Anything outside the primitive
/// set fails loudly rather than producing a silent zero gradient.
class Tape {
 public:
  /// Differentiable leaf (receives an adjoint). Column vector or matrix.
  Var leaf(const Eigen::MatrixXd& value);
  /// Non-differentiable constant.
  Var constant(const Eigen::MatrixXd& value);

  /// y = W x + b applied column-wise, where W (out x in, row-major) and b
  /// (out) live in `params` starting at `offset`: W first, then b.
  Var affine(Var params, int offset, int out_dim, int in_dim, Var x);

  Var tanh(Var x);
  Var relu(Var x);
  Var exp(Var x);
  Var log(Var x);
  Var neg(Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var x, double s);
  Var add_scalar(Var x, double s);

  /// Replicate a column vector across n columns.
  Var broadcast_cols(Var colvec, int n);
  /// Rows [offset, offset+len) of a column vector.
  Var slice_rows(Var colvec, int offset, int len);
  /// Sum over rows: (m x n) -> (1 x n).
  Var sum_rows(Var x);
  /// Sum of all entries -> (1 x 1).
  Var sum(Var x);

  const Eigen::MatrixXd& value(Var v) const { return nodes_[v.idx].value; }
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Backpropagate from a scalar (1x1) node. Adjoints of all reachable
  /// differentiable nodes become available via adjoint().
  void backward(Var scalar_loss);
  const Eigen::MatrixXd& adjoint(Var v) const;

 private:
  enum class Op {
    Leaf,
    Constant,
    Affine,
    Tanh,
    Relu,
    Exp,
    Log,
    Neg,
    Add,
    Sub,
    Mul,
    Scale,
    AddScalar,
    BroadcastCols,
    SliceRows,
    SumRows,
    Sum,
  };

  struct Node {
    Op op;
    Eigen::MatrixXd value;
    Eigen::MatrixXd adjoint;
    bool has_adjoint{false};
    int a{-1};
    int b{-1};
    int offset{0};
    int out_dim{0};
    int in_dim{0};
    double scalar{0.0};
  };

  Var push(Node&& n);
  Eigen::MatrixXd& grad_buffer(int idx);
  void backward_node(int idx);

  std::vector<Node> nodes_;
  Eigen::MatrixXd constant_sink_;
};

}  // namespace ctrpo::ad
