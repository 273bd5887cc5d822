#include "hssas/tape.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace hssas {
namespace {

std::string dims(Index rows, Index cols) { return std::to_string(rows) + "x" + std::to_string(cols); }

void require_same_tape(Var a, Var b) {
  if (!a.valid() || !b.valid() || a.tape() != b.tape()) throw InvariantError("variables belong to different tapes");
}

void require_same_shape(const char* op, Var a, Var b) {
  require_same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + dims(a.rows(), a.cols()) + " vs " +
                         dims(b.rows(), b.cols()));
  }
}

}  // namespace

Eigen::Map<const Matrix> Var::value() const { return tape_->value(id_); }
Index Var::rows() const { return value().rows(); }
Index Var::cols() const { return value().cols(); }

double Var::scalar() const {
  if (size() != 1) throw DimensionError("scalar() on a " + dims(rows(), cols()) + " variable");
  return value()(0, 0);
}

Var Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::constant(double value) { return push(Matrix::Constant(1, 1, value), nullptr); }

Var Tape::param(Param& param) {
  Node n;
  n.param = &param;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::push(Matrix value, Backward backward) {
  Node n;
  n.value = std::move(value);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Eigen::Map<const Matrix> Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.param) return std::as_const(n.param->value).matrix();
  return {n.value.data(), n.value.rows(), n.value.cols()};
}

void Tape::accumulate(std::size_t id, const Eigen::Ref<const Matrix>& grad) {
  Node& n = node(id);
  if (!n.has_grad) {
    n.grad = grad;
    n.has_grad = true;
  } else {
    n.grad += grad;
  }
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.has_grad) return n.grad;
  return Matrix::Zero(v.rows(), v.cols());
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw InvariantError("backward: loss recorded on another tape");
  if (loss.size() != 1) {
    throw DimensionError("backward: loss must be a scalar, got " + dims(loss.rows(), loss.cols()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
  }
  accumulate(loss.id(), Matrix::Ones(1, 1));
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad) continue;
    if (n.param) {
      n.param->grad.matrix() += n.grad;
    } else if (n.backward) {
      n.backward(*this, n.grad);
    }
  }
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree for " + dims(a.rows(), a.cols()) + " * " +
                         dims(b.rows(), b.cols()));
  }
  Matrix out = a.value() * b.value();
  return a.tape()->push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a.id(), g * b.value().transpose());
    t.accumulate(b.id(), a.value().transpose() * g);
  });
}

Var transpose(Var a) {
  Matrix out = a.value().transpose();
  return a.tape()->push(std::move(out), [a](Tape& t, const Matrix& g) { t.accumulate(a.id(), g.transpose()); });
}

Var add(Var a, Var b) {
  require_same_shape("add", a, b);
  Matrix out = a.value() + b.value();
  return a.tape()->push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a.id(), g);
    t.accumulate(b.id(), g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a, b);
  Matrix out = a.value() - b.value();
  return a.tape()->push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a.id(), g);
    t.accumulate(b.id(), -g);
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a, b);
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape()->push(std::move(out), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a.id(), g.cwiseProduct(b.value()));
    t.accumulate(b.id(), g.cwiseProduct(a.value()));
  });
}

Var scale(Var a, double factor) {
  Matrix out = a.value() * factor;
  return a.tape()->push(std::move(out), [a, factor](Tape& t, const Matrix& g) { t.accumulate(a.id(), g * factor); });
}

Var scale(Var a, Var factor) {
  require_same_tape(a, factor);
  if (factor.size() != 1) throw DimensionError("scale: factor must be 1x1, got " + dims(factor.rows(), factor.cols()));
  Matrix out = a.value() * factor.scalar();
  return a.tape()->push(std::move(out), [a, factor](Tape& t, const Matrix& g) {
    t.accumulate(a.id(), g * factor.scalar());
    t.accumulate(factor.id(), Matrix::Constant(1, 1, g.cwiseProduct(a.value()).sum()));
  });
}

Var activation(Var x, Activation kind) {
  Matrix out;
  if (kind == Activation::kTanh) {
    out = x.value().array().tanh().matrix();
  } else {
    out = stable_sigmoid(x.value().array()).matrix();
  }
  // Derivatives are expressed through the output, which the node owns.
  Tape* tape = x.tape();
  const std::size_t self = tape->size();
  return tape->push(std::move(out), [x, kind, self](Tape& t, const Matrix& g) {
    const auto y = t.value(self).array();
    if (kind == Activation::kTanh) {
      t.accumulate(x.id(), (g.array() * (1.0 - y.square())).matrix());
    } else {
      t.accumulate(x.id(), (g.array() * y * (1.0 - y)).matrix());
    }
  });
}

Var softmax(Var logits, std::span<const std::uint8_t> mask) {
  Matrix out = masked_softmax(logits.value(), mask);
  Tape* tape = logits.tape();
  const std::size_t self = tape->size();
  return tape->push(std::move(out), [logits, self](Tape& t, const Matrix& g) {
    // dL/dz_i = y_i (g_i - <g, y>); masked positions have y_i = 0.
    const auto y = t.value(self);
    const double inner = g.cwiseProduct(y).sum();
    t.accumulate(logits.id(), y.cwiseProduct((g.array() - inner).matrix()));
  });
}

Var sum(Var x) {
  Matrix out = Matrix::Constant(1, 1, x.value().sum());
  return x.tape()->push(std::move(out), [x](Tape& t, const Matrix& g) {
    t.accumulate(x.id(), Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
  });
}

Var log_clamped(Var x, double floor) {
  Matrix out = x.value().unaryExpr([floor](double v) { return std::log(std::max(v, floor)); });
  return x.tape()->push(std::move(out), [x, floor](Tape& t, const Matrix& g) {
    const auto v = x.value();
    Matrix d = v.unaryExpr([floor](double e) { return e > floor ? 1.0 / e : 0.0; });
    t.accumulate(x.id(), g.cwiseProduct(d));
  });
}

Var concat(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != 1 || b.cols() != 1) throw DimensionError("concat expects column vectors");
  const Index n = a.rows();
  Matrix out(n + b.rows(), 1);
  out.topRows(n) = a.value();
  out.bottomRows(b.rows()) = b.value();
  return a.tape()->push(std::move(out), [a, b, n](Tape& t, const Matrix& g) {
    t.accumulate(a.id(), g.topRows(n));
    t.accumulate(b.id(), g.bottomRows(g.rows() - n));
  });
}

Var stack_rows(std::span<const Var> columns) {
  if (columns.empty()) throw DimensionError("stack_rows of zero vectors");
  const Index width = columns.front().rows();
  Matrix out(static_cast<Index>(columns.size()), width);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    require_same_tape(columns.front(), columns[i]);
    if (columns[i].cols() != 1 || columns[i].rows() != width) {
      throw DimensionError("stack_rows: row " + std::to_string(i) + " is " +
                           dims(columns[i].rows(), columns[i].cols()) + ", expected " + dims(width, 1));
    }
    out.row(static_cast<Index>(i)) = columns[i].value().transpose();
  }
  std::vector<Var> inputs(columns.begin(), columns.end());
  return columns.front().tape()->push(std::move(out), [inputs = std::move(inputs)](Tape& t, const Matrix& g) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      t.accumulate(inputs[i].id(), g.row(static_cast<Index>(i)).transpose());
    }
  });
}

Var row(Var m, Index r) {
  if (r < 0 || r >= m.rows()) throw DimensionError("row index " + std::to_string(r) + " outside " + dims(m.rows(), m.cols()));
  Matrix out = m.value().row(r).transpose();
  return m.tape()->push(std::move(out), [m, r](Tape& t, const Matrix& g) {
    Matrix full = Matrix::Zero(m.rows(), m.cols());
    full.row(r) = g.transpose();
    t.accumulate(m.id(), full);
  });
}

Var gather_rows(Tape& tape, Param& table, std::span<const int> ids) {
  const auto values = table.value.matrix();
  Matrix out = Matrix::Zero(static_cast<Index>(ids.size()), values.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    if (id < 0 || id >= values.rows()) {
      throw DimensionError("gather: id " + std::to_string(id) + " outside table of " + std::to_string(values.rows()) +
                           " rows (" + table.name + ")");
    }
    if (id != 0) out.row(static_cast<Index>(i)) = values.row(id);
  }
  std::vector<int> rows(ids.begin(), ids.end());
  Param* target = &table;
  return tape.push(std::move(out), [target, rows = std::move(rows)](Tape&, const Matrix& g) {
    auto grad = target->grad.matrix();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] != 0) grad.row(rows[i]) += g.row(static_cast<Index>(i));
    }
  });
}

}  // namespace hssas
