#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stochsys {

// Subject characteristic that stays fixed over the whole horizon (sex, birth
// cohort, genotype). Categorical attributes are encoded numerically.
struct Attribute {
  std::string name;
  double value = 0.0;
};

// Right-continuous step function on [0, inf). Segment i covers
// [breakpoints[i-1], breakpoints[i]) with an implicit leading breakpoint at 0,
// so values.size() == breakpoints.size() + 1 and the function is defined on
// any horizon. A constant function has no breakpoints.
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<double> values{0.0};

  static StepFunction constant(double v) { return StepFunction{{}, {v}}; }
  bool is_constant() const { return breakpoints.empty(); }

  double operator()(double t) const {
    std::size_t i = 0;
    while (i < breakpoints.size() && t >= breakpoints[i]) ++i;
    return values[i];
  }
};

// External control trajectory fed into the system (cigarettes/day, energy
// intake, a clamped treatment level, ...).
struct InputFunction {
  std::string name;
  StepFunction curve;
};

struct LinearTerm {
  std::string parent;
  double coefficient = 0.0;
};

// intercept + sum of coefficient * parent value. Each parent may appear at
// most once; a term is what makes the parent a structural influence, even if
// its coefficient is zero (validation warns about that case).
struct LinearForm {
  double intercept = 0.0;
  std::vector<LinearTerm> terms;
};

// Keep this order in sync with ProcessSpec::params (variant index == kind).
enum class ProcessKind { OU, DriftDiffusion, Counting, ThresholdEvent };

enum class IntensityForm { Additive, Multiplicative };

std::string_view to_string(ProcessKind k);
std::string_view to_string(IntensityForm f);

// Mean-reverting diffusion dX = -theta (X - mu_t) dt + sigma dB, where the
// moving target mu_t is a linear form over the parents. Note the sign: with
// theta > 0 the process is pulled toward its target, so constant parents give
// a stationary regime.
struct OUParams {
  double theta = 1.0;
  double sigma = 1.0;
  LinearForm target;
};

// Accumulating diffusion dX = drift_t dt + sigma dB. The drift is a linear
// form over the parents and may go negative; it is a drift, not a rate.
struct DriftDiffusionParams {
  LinearForm drift;
  double sigma = 0.0;
};

// Counting process with at most at_risk jumps (1 for 0-1 event processes).
// Additive form: baseline(t) + sum(beta * parent), clamped at zero at
// evaluation time. Multiplicative form: baseline(t) * exp(sum(beta * parent)).
struct CountingParams {
  IntensityForm intensity_form = IntensityForm::Additive;
  StepFunction baseline;
  std::vector<LinearTerm> terms;
  long at_risk = 1;
};

// 0-1 event fired at the first grid time where the monitored process strictly
// exceeds eta. Degradation-model reading: the event has no intensity of its
// own, it is a deterministic functional of the monitored path.
struct ThresholdEventParams {
  std::string monitored;
  double eta = 0.0;
};

struct ProcessSpec {
  std::string name;
  double initial_value = 0.0;
  std::variant<OUParams, DriftDiffusionParams, CountingParams,
               ThresholdEventParams>
      params;

  ProcessKind kind() const { return static_cast<ProcessKind>(params.index()); }
  bool is_continuous() const {
    return kind() == ProcessKind::OU || kind() == ProcessKind::DriftDiffusion;
  }

  // Structural parents: every name appearing in the drift/intensity/target
  // form, plus the monitored process for threshold events. The implicit
  // dependence of a process on its own past (mean reversion, the at-risk
  // indicator) is not listed.
  std::vector<std::string> parents() const;

  const OUParams& ou() const;
  const DriftDiffusionParams& drift_diffusion() const;
  const CountingParams& counting() const;
  const ThresholdEventParams& threshold() const;

  static ProcessSpec make_ou(std::string name, double theta, double sigma,
                             LinearForm target, double initial_value = 0.0);
  static ProcessSpec make_drift_diffusion(std::string name, LinearForm drift,
                                          double sigma,
                                          double initial_value = 0.0);
  static ProcessSpec make_counting(std::string name, IntensityForm form,
                                   StepFunction baseline,
                                   std::vector<LinearTerm> terms,
                                   long at_risk = 1);
  static ProcessSpec make_threshold_event(std::string name,
                                          std::string monitored, double eta);
};

// A named collection of processes, inputs and attributes; the unit that is
// validated, graphed, simulated and intervened on. Immutable once validated;
// all operations taking a SystemSpec treat it as read-only.
struct SystemSpec {
  std::string name;
  double horizon = 0.0;
  std::vector<ProcessSpec> processes;
  std::vector<InputFunction> inputs;
  std::vector<Attribute> attributes;

  const ProcessSpec* find_process(std::string_view n) const;
  const InputFunction* find_input(std::string_view n) const;
  const Attribute* find_attribute(std::string_view n) const;
  bool has_name(std::string_view n) const;
};

// A run could not proceed (blow-up, bad grid, invalid call).
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// replications * steps exceeded the configured budget.
struct BudgetError : SimulationError {
  using SimulationError::SimulationError;
};

// Malformed external file (JSON schema violation, unknown key, bad value).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stochsys
