#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stochsys/simulate.hpp"
#include "stochsys/types.hpp"

namespace stochsys {

// One physiological indicator (BMI, LDL, CRP, SBP) modeled as a
// mean-reverting process whose target is linear in the lifestyle inputs.
// Values are deviations from a reference level, so mu0 = 0 and zero initial
// values are the natural defaults.
struct PhysiologyParams {
  double theta = 0.5;
  double sigma = 0.2;
  double mu0 = 0.0;
  double beta_smoking = 0.0;
  double beta_activity = 0.0;
  double beta_diet = 0.0;
};

// Coronary-heart-disease lifecourse system: three lifestyle inputs drive four
// physiological processes, the atheromatous process accumulates with a drift
// linear in the physiology, and the CHD event fires when it crosses eta.
// The shipped default parameter values are illustrative placeholders, not
// fitted estimates.
struct CHDConfig {
  PhysiologyParams bmi{0.4, 0.20, 0.0, 0.010, -0.020, 0.030};
  PhysiologyParams ldl{0.5, 0.25, 0.0, 0.020, -0.015, 0.025};
  PhysiologyParams crp{0.8, 0.30, 0.0, 0.030, -0.010, 0.010};
  PhysiologyParams sbp{0.3, 0.25, 0.0, 0.015, -0.015, 0.015};

  double lambda0 = 0.30;  // baseline atheroma accumulation rate
  double beta_bmi = 0.30;
  double beta_ldl = 0.50;
  double beta_crp = 0.40;
  double beta_sbp = 0.30;
  double sigma_a = 1.0;

  double eta = 25.0;  // atheroma burden at which CHD is declared

  StepFunction smoking = StepFunction::constant(20.0);   // cigarettes/day
  StepFunction activity = StepFunction::constant(0.0);   // energy expenditure
  StepFunction diet = StepFunction::constant(0.0);       // energy intake

  double horizon = 40.0;  // years of adult life

  double initial_bmi = 0.0;
  double initial_ldl = 0.0;
  double initial_crp = 0.0;
  double initial_sbp = 0.0;
  double initial_atheroma = 0.0;

  // Replace the OU physiology by its moving target (equilibrium reached
  // rapidly): the atheroma drift becomes linear in the lifestyle inputs
  // directly and, for constant lifestyles, the system reduces to a drifted
  // Brownian degradation with an Inverse Gaussian hitting law.
  bool equilibrium = false;
};

// Process names: BMI, LDL, CRP, SBP, Ath, CHD; inputs: Smoking, Activity,
// Diet. Terms with a zero coefficient are dropped, so the influence graph
// only shows real structure. Throws std::invalid_argument when the config
// violates its invariants (theta <= 0, eta not above the initial atheroma).
SystemSpec build_chd_system(const CHDConfig& cfg);

// Saturating transfer coefficient beta * (1 - exp(-theta * t)): the share of
// a lifestyle shift that has propagated into a mean-reverting process after
// time t. Monotone from 0 at t=0 toward beta.
double beta_t(double beta, double theta, double t);

// Closed-form instantaneous contrast of the atheroma drift between two
// constant smoking trajectories:
//   [sum_p beta_t(beta_p, theta_p, t) * beta_smoking_p] * (s - s').
// Only valid for constant lifestyles; throws otherwise (use the Monte Carlo
// path for time-varying inputs).
double atheroma_contrast(const CHDConfig& cfg, const StepFunction& s,
                         const StepFunction& s_alt, double t);

// First-passage law of a unit-diffusion Brownian motion with drift lambda
// over barrier eta > 0. For sigma != 1 rescale (eta, lambda) by 1/sigma
// before calling; chd_ig_params does that.
struct IGParams {
  double eta = 1.0;
  double lambda = 0.0;
};

// Density eta / sqrt(2 pi t^3) * exp(-(eta - lambda t)^2 / (2 t)), t > 0.
// Computed in log space so the t -> 0+ limit underflows cleanly to 0.
double ig_pdf(const IGParams& p, double t);

// 1 - integral of ig_pdf over (0, t], by adaptive quadrature. Defective for
// lambda < 0: the total mass is exp(2 eta lambda) < 1, so the survival
// plateaus above zero.
double ig_survival(const IGParams& p, double t, double tol = 1e-9);

// ig_pdf / ig_survival; throws std::domain_error once the survival is
// numerically indistinguishable from zero.
double chd_hazard(const IGParams& p, double t, double tol = 1e-9);

// Total mass of ig_pdf over (0, inf) by adaptive quadrature with an explicit
// tail bound; requires lambda > 0 (otherwise the tail is not integrably
// thin). Equals 1 up to the tolerance.
double ig_pdf_mass(const IGParams& p, double tol = 1e-9);

// Hitting probability over an infinite horizon: 1 for lambda >= 0, else
// exp(2 eta lambda).
double ig_hitting_probability(const IGParams& p);

// Barrier and drift of the equilibrium constant-lifestyle reduction,
// rescaled to unit diffusion. Requires constant lifestyle inputs.
IGParams chd_ig_params(const CHDConfig& cfg);

struct CHDDemoReport {
  std::vector<double> grid;
  // P(CHD_t = 1) under the two lifestyle configurations.
  std::vector<double> p_mc_a, p_mc_b;
  std::vector<double> stderr_a, stderr_b;
  std::vector<double> contrast;         // additive, a - b
  std::vector<double> contrast_stderr;
  // Inverse Gaussian curves for the constant-lifestyle simplification;
  // empty when a lifestyle input varies in time.
  std::vector<double> p_ig_a, p_ig_b;
  bool analytic = false;
  Diagnostics diagnostics_a, diagnostics_b;
  long replications = 0;
  std::uint64_t seed = 0;
};

// Full-system Monte Carlo under both lifestyle configurations (they must
// agree on everything else), reporting the CHD incidence curves, their
// additive contrast and, when lifestyles are constant, the analytic curves
// alongside. Replicates stop at the CHD event.
CHDDemoReport chd_demo(const CHDConfig& cfg, const CHDConfig& cfg_alt,
                       const SimConfig& sim);

}  // namespace stochsys
