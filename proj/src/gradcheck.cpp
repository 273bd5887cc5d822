#include "hssas/gradcheck.hpp"

#include <cmath>

namespace hssas {
namespace {

double evaluate(const Objective& f) {
  Tape tape;
  const double v = f(tape).scalar();
  if (!std::isfinite(v)) throw InvariantError("finite_diff_check: objective is not finite");
  return v;
}

}  // namespace

GradCheckReport finite_diff_check(const Objective& f, std::span<Param* const> params, double step) {
  if (!(step > 0.0)) throw InvariantError("finite_diff_check: step must be positive");
  for (Param* p : params) p->zero_grad();
  {
    Tape tape;
    Var loss = f(tape);
    if (!std::isfinite(loss.scalar())) throw InvariantError("finite_diff_check: objective is not finite");
    tape.backward(loss);
  }

  GradCheckReport report;
  for (Param* p : params) {
    for (Index i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + step;
      const double plus = evaluate(f);
      p->value[i] = saved - step;
      const double minus = evaluate(f);
      p->value[i] = saved;

      const double numeric = (plus - minus) / (2.0 * step);
      const double analytic = p->grad[i];
      const double err = std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
      ++report.coordinates;
      if (err > report.max_relative_error || report.worst_index < 0) {
        report.max_relative_error = err;
        report.worst_param = p->name;
        report.worst_index = i;
        report.analytic = analytic;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace hssas
