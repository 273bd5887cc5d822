#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <span>

#include "hssas/errors.hpp"

namespace hssas {

enum class Activation { kTanh, kSigmoid };

/// Logistic function evaluated without overflow: exp is only ever taken of a
/// non-positive argument.
template <std::floating_point Scalar>
Scalar stable_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Derived>
auto stable_sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return stable_sigmoid(v); });
}

/// Max-subtracted softmax over all coefficients of `logits`. Positions whose
/// mask entry is zero get exactly zero weight. An empty mask means no masking.
template <typename Derived>
typename Derived::PlainObject masked_softmax(const Eigen::MatrixBase<Derived>& logits, std::span<const std::uint8_t> mask = {}) {
  using Scalar = typename Derived::Scalar;
  const auto n = logits.size();
  if (n == 0) throw DimensionError("softmax of an empty vector");
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != n) {
    throw DimensionError("softmax mask length " + std::to_string(mask.size()) + " does not match " +
                         std::to_string(n) + " logits");
  }
  auto active = [&](Eigen::Index i) { return mask.empty() || mask[static_cast<std::size_t>(i)]; };

  typename Derived::PlainObject out = logits;
  bool any = false;
  Scalar peak = Scalar(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!active(i)) continue;
    peak = any ? std::max(peak, logits.derived().coeff(i)) : logits.derived().coeff(i);
    any = true;
  }
  if (!any) throw InvariantError("softmax with every position masked has empty support");

  Scalar total = Scalar(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar e = active(i) ? std::exp(logits.derived().coeff(i) - peak) : Scalar(0);
    out.coeffRef(i) = e;
    total += e;
  }
  out /= total;
  return out;
}

}  // namespace hssas
