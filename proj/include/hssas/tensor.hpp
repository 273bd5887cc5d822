#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hssas/errors.hpp"

namespace hssas {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Matrix = RowMatrix<double>;
using Vector = Eigen::VectorXd;

using Shape = std::vector<Index>;

inline std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

inline Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

/// Dense row-major array with explicit extents.
///
/// Rank 0 is a scalar, rank 1 a column vector, rank 2 a matrix. `matrix()`
/// maps the flat storage as rows x cols without copying, so all arithmetic
/// goes through Eigen expressions.
template <typename Scalar>
class BasicTensor {
 public:
  using MatrixType = RowMatrix<Scalar>;
  using MapType = Eigen::Map<MatrixType>;
  using ConstMapType = Eigen::Map<const MatrixType>;

  BasicTensor() = default;

  explicit BasicTensor(Shape shape) : shape_(std::move(shape)) {
    for (Index extent : shape_) {
      if (extent <= 0) throw DimensionError("tensor extents must be positive, got " + shape_string(shape_));
    }
    if (shape_.size() > 2) throw DimensionError("tensor rank above 2 is not supported");
    data_.assign(static_cast<std::size_t>(shape_size(shape_)), Scalar(0));
  }

  BasicTensor(Shape shape, std::vector<Scalar> data) : BasicTensor(std::move(shape)) {
    if (data.size() != data_.size()) {
      throw DimensionError("tensor data length " + std::to_string(data.size()) + " does not match shape " +
                           shape_string(shape_));
    }
    data_ = std::move(data);
  }

  static BasicTensor scalar(Scalar value) { return BasicTensor(Shape{}, {value}); }

  /// Copies an Eigen expression. With `as_vector` the (row or column) vector
  /// becomes a rank-1 tensor.
  template <typename Derived>
  static BasicTensor from_matrix(const Eigen::MatrixBase<Derived>& m, bool as_vector = false) {
    if (as_vector) {
      BasicTensor out(Shape{m.size()});
      out.matrix() = m.derived().template cast<Scalar>().reshaped(m.size(), 1);
      return out;
    }
    BasicTensor out(Shape{m.rows(), m.cols()});
    out.matrix() = m.derived().template cast<Scalar>();
    return out;
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  Index size() const { return static_cast<Index>(data_.size()); }
  Index rows() const { return shape_.empty() ? 1 : shape_[0]; }
  Index cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }

  MapType matrix() { return MapType(data_.data(), rows(), cols()); }
  ConstMapType matrix() const { return ConstMapType(data_.data(), rows(), cols()); }

  Scalar& operator[](Index i) { return data_[static_cast<std::size_t>(i)]; }
  Scalar operator[](Index i) const { return data_[static_cast<std::size_t>(i)]; }

  void set_zero() { std::fill(data_.begin(), data_.end(), Scalar(0)); }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](Scalar v) { return std::isfinite(v); });
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  Shape shape_;
  std::vector<Scalar> data_;
};

using Tensor = BasicTensor<double>;

/// Learnable array together with its gradient buffer.
struct Param {
  Param() = default;
  Param(std::string param_name, Shape shape)
      : name(std::move(param_name)), value(shape), grad(std::move(shape)) {}

  std::string name;
  Tensor value;
  Tensor grad;

  void zero_grad() { grad.set_zero(); }
};

}  // namespace hssas
