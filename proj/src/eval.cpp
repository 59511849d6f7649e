#include "stochsys/eval.hpp"

#include <cmath>
#include <string>

namespace stochsys {

double eval_linear_form(const LinearForm& form, double t,
                        const HistoryView& history) {
  double acc = form.intercept;
  for (const auto& term : form.terms)
    acc += term.coefficient * history.value(term.parent, t);
  return acc;
}

double eval_drift(const ProcessSpec& spec, double t,
                  const HistoryView& history) {
  switch (spec.kind()) {
    case ProcessKind::OU: {
      const auto& p = spec.ou();
      const double mu = eval_linear_form(p.target, t, history);
      const double x = history.value(spec.name, t);
      return -p.theta * (x - mu);
    }
    case ProcessKind::DriftDiffusion:
      return eval_linear_form(spec.drift_diffusion().drift, t, history);
    default:
      throw std::invalid_argument("eval_drift: process '" + spec.name +
                                  "' has no drift");
  }
}

double eval_intensity(const ProcessSpec& spec, double t,
                      const HistoryView& history, bool* clamped) {
  if (spec.kind() != ProcessKind::Counting)
    throw std::invalid_argument("eval_intensity: process '" + spec.name +
                                "' is not a counting process");
  if (clamped) *clamped = false;
  const auto& p = spec.counting();
  // the 1_{D_{t-} = 0} factor, generalized to at_risk jumps
  if (history.jump_count(spec.name, t) >= p.at_risk) return 0.0;
  const double base = p.baseline(t);
  if (p.intensity_form == IntensityForm::Multiplicative) {
    double expo = 0.0;
    for (const auto& term : p.terms)
      expo += term.coefficient * history.value(term.parent, t);
    return base * std::exp(expo);
  }
  double lambda = base;
  for (const auto& term : p.terms)
    lambda += term.coefficient * history.value(term.parent, t);
  if (lambda < 0.0) {
    if (clamped) *clamped = true;
    return 0.0;
  }
  return lambda;
}

}  // namespace stochsys
