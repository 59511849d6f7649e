#pragma once

#include <string>
#include <vector>

#include "stochsys/types.hpp"

namespace stochsys {

struct ValidationIssue {
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
  std::string to_string() const;
};

// Checks every structural invariant of a system: unique names, resolvable
// parents, positive reversion rates, nonnegative sigmas, well-formed step
// functions, threshold events monitoring continuous processes and not feeding
// back into them. Warnings flag zero coefficients and unreferenced inputs.
// Deterministic: the same spec always yields the identical report.
ValidationReport validate_system(const SystemSpec& spec);

}  // namespace stochsys
