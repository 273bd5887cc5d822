#pragma once

#include <functional>
#include <span>
#include <string>

#include "hssas/tape.hpp"

namespace hssas {

/// Scalar objective recorded on the given tape.
using Objective = std::function<Var(Tape&)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_param;
  Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Compares reverse-mode gradients of `f` against central differences
/// (f(x+h) - f(x-h)) / 2h over every coordinate of every param. The per
/// coordinate error is |a - n| / max(1e-8, |a| + |n|).
///
/// Param grads are overwritten with the analytic gradient.
GradCheckReport finite_diff_check(const Objective& f, std::span<Param* const> params, double step);

}  // namespace hssas
