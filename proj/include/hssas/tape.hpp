#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hssas/numerics.hpp"
#include "hssas/tensor.hpp"

namespace hssas {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  Eigen::Map<const Matrix> value() const;
  Index rows() const;
  Index cols() const;
  Index size() const { return rows() * cols(); }
  /// Value of a 1x1 variable.
  double scalar() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Linear record of differentiable operations for one forward pass.
///
/// Nodes are appended in execution order; backward() walks them in reverse,
/// so every node's gradient is complete before it is propagated further.
/// Gradients flowing into parameter leaves are added to Param::grad, which the
/// caller owns and zeroes.
class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var constant(double value);
  /// Leaf referencing `param` without copying it. The Param must outlive the tape.
  Var param(Param& param);

  Var push(Matrix value, Backward backward);

  Eigen::Map<const Matrix> value(std::size_t id) const;
  void accumulate(std::size_t id, const Eigen::Ref<const Matrix>& grad);

  /// Gradient recorded for `v` by the last backward(); zero if none reached it.
  Matrix grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }

  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Param* param = nullptr;
    Backward backward;
    Matrix grad;
    bool has_grad = false;
  };

  Node& node(std::size_t id) { return nodes_[id]; }

  std::vector<Node> nodes_;
};

inline void backward(Var loss) { loss.tape()->backward(loss); }

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
/// Multiplies every coefficient of `a` by the 1x1 variable `factor`.
Var scale(Var a, Var factor);
Var activation(Var x, Activation kind);
inline Var tanh(Var x) { return activation(x, Activation::kTanh); }
inline Var sigmoid(Var x) { return activation(x, Activation::kSigmoid); }
/// Softmax over all coefficients; output has the shape of `logits`.
Var softmax(Var logits, std::span<const std::uint8_t> mask = {});
Var sum(Var x);
/// Natural log with the argument clamped from below at `floor`.
Var log_clamped(Var x, double floor);
/// Stacks two column vectors.
Var concat(Var a, Var b);
/// Builds a T x n matrix whose t-th row is the n x 1 column `columns[t]`.
Var stack_rows(std::span<const Var> columns);
/// Row `r` of `m` as a column vector.
Var row(Var m, Index r);
/// Rows of `table` selected by `ids` (T x cols). Row 0 is padding: it is
/// gathered as zeros and never receives gradient.
Var gather_rows(Tape& tape, Param& table, std::span<const int> ids);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }

}  // namespace hssas
