#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stochsys/graph.hpp"
#include "stochsys/history.hpp"
#include "stochsys/simulate.hpp"
#include "stochsys/types.hpp"

namespace stochsys {

// Contrast function phi(x, y): additive x - y, multiplicative x / y. The
// multiplicative contrast requires strictly positive arguments.
enum class ContrastKind { Additive, Multiplicative };

double apply_contrast(ContrastKind kind, double x, double y);

struct EffectReport {
  std::string kind;  // "instantaneous" | "cumulative" | "marginal"
  ContrastKind contrast = ContrastKind::Additive;
  std::string target;
  std::string intervened;
  // Curves over `grid`; empty for scalar effects. `contrast_curve` may hold
  // NaN where a multiplicative contrast is undefined.
  std::vector<double> grid;
  std::vector<double> value_f;
  std::vector<double> value_f_alt;
  std::vector<double> contrast_curve;
  std::vector<double> mc_stderr;  // present iff Monte Carlo was used
  bool monte_carlo = false;
  long replications = 0;
  std::uint64_t seed = 0;
};

// Instantaneous effect of the factor on the target at time t: the contrast of
// the target's intensity (drift for diffusions) under factor trajectory f
// versus f_alt, holding every other history fixed. For 0-1 counting targets
// the target's own pre-event history is pinned to zero jumps; multi-jump
// targets read their count from `history`, which the caller must set up.
double instantaneous_effect(const SystemSpec& spec, std::string_view target,
                            std::string_view factor, const StepFunction& f,
                            const StepFunction& f_alt, double t,
                            const HistoryView& history, ContrastKind contrast);

// Cumulative effect at t: the contrast of the compensators, integrated with
// the left-endpoint rectangle rule on a grid of the given step (matching the
// t- convention). In the additive model this equals the integral of the
// instantaneous effect.
double cumulative_effect(const SystemSpec& spec, std::string_view target,
                         std::string_view factor, const StepFunction& f,
                         const StepFunction& f_alt, double t, double step,
                         const HistoryView& history, ContrastKind contrast);

// Mixture of conditional survivals weighted by the marginal confounder law:
// P(G=1) S(t|f,G=1) + P(G=0) S(t|f,G=0). Inputs must lie in [0, 1].
double marginal_effect_discrete(double p_g1, double s_f_g1, double s_f_g0);

// Marginal causal effect by simulation: applies both do-interventions (they
// must target the same process), simulates each intervened system and
// contrasts the target's survival curves (mean curves for continuous
// targets) with Monte Carlo standard errors. Identical interventions under a
// shared seed contrast to exactly zero.
EffectReport marginal_effect_mc(const SystemSpec& spec, const Intervention& iv,
                                const Intervention& iv_alt,
                                const SimConfig& cfg, std::string_view target,
                                ContrastKind contrast = ContrastKind::Additive);

struct ConditionalEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long n = 0;  // replicates in the conditioning stratum
};

// Observational estimate of P(target has no event by t | each conditioner's
// jump count at t equals the given value), from an ensemble of the
// *un-intervened* system. This is the quantity a study without the do would
// report, and it differs from the interventional survival under confounding.
ConditionalEstimate observational_survival(
    const SystemSpec& spec, const SimConfig& cfg, std::string_view target,
    const std::vector<std::pair<std::string, long>>& given, double t);

// Observational estimate of P(jump count of `name` at t equals `value`).
ConditionalEstimate event_probability(const SystemSpec& spec,
                                      const SimConfig& cfg,
                                      std::string_view name, long value,
                                      double t);

// Three-process confounding system (G -> F, G -> D, F -> D) with 0-1
// counting processes realized as one-step Bernoulli draws: G decides in the
// first step, F in the second (with P(F=1|G) exact by construction), and D
// accumulates hazard a + b F + c G afterwards so that the survival
// probabilities conditional on (F=1, G) hit the requested values at
// t = t_eval + 2 * step. The confounded observational survival and the
// interventional mixture then disagree by the textbook gap.
struct DiscreteExampleParams {
  double p_g1 = 0.5;     // P(G=1)
  double p_f_g1 = 0.9;   // P(F=1 | G=1)
  double p_f_g0 = 0.1;   // P(F=1 | G=0)
  double s_f1_g1 = 0.8;  // S(t_eval | F=1, G=1)
  double s_f1_g0 = 0.6;  // S(t_eval | F=1, G=0)
  double s_f0_g0 = 0.7;  // S(t_eval | F=0, G=0)
  double t_eval = 1.0;
  double step = 1e-3;
};

SystemSpec discrete_confounding_system(const DiscreteExampleParams& p);

}  // namespace stochsys
