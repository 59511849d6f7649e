#pragma once

#include "stochsys/history.hpp"
#include "stochsys/types.hpp"

namespace stochsys {

double eval_linear_form(const LinearForm& form, double t,
                        const HistoryView& history);

// Drift of a continuous process at t given the history up to t-. For OU this
// is -theta * (X_{t-} - mu_t); for a drifted diffusion it is the drift form
// itself. Throws std::invalid_argument for counting/threshold processes.
double eval_drift(const ProcessSpec& spec, double t,
                  const HistoryView& history);

// Intensity of a counting process at t given the history up to t-. Zero once
// the at-risk bound is reached; the additive form is clamped at zero
// (*clamped reports when that happened). Throws std::invalid_argument when
// called on a non-counting process.
double eval_intensity(const ProcessSpec& spec, double t,
                      const HistoryView& history, bool* clamped = nullptr);

}  // namespace stochsys
