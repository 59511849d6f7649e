#include "stochsys/chd.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stochsys/quadrature.hpp"
#include "stochsys/validate.hpp"

namespace stochsys {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void append_nonzero(LinearForm& form, const std::string& parent, double coef) {
  // zero structure is dropped so the influence graph shows real pathways only
  if (coef != 0.0) form.terms.push_back({parent, coef});
}

void check_config(const CHDConfig& cfg) {
  auto check_theta = [](const char* name, const PhysiologyParams& p) {
    if (!(p.theta > 0.0)) {
      std::ostringstream os;
      os << name << ": nonpositive reversion rate (theta = " << p.theta << ")";
      throw std::invalid_argument(os.str());
    }
    if (p.sigma < 0.0)
      throw std::invalid_argument(std::string(name) + ": negative sigma");
  };
  check_theta("BMI", cfg.bmi);
  check_theta("LDL", cfg.ldl);
  check_theta("CRP", cfg.crp);
  check_theta("SBP", cfg.sbp);
  if (cfg.sigma_a < 0.0) throw std::invalid_argument("Ath: negative sigma");
  if (!(cfg.eta > cfg.initial_atheroma))
    throw std::invalid_argument(
        "threshold eta must exceed the initial atheroma value");
  if (!(cfg.horizon > 0.0))
    throw std::invalid_argument("horizon must be positive");
}

struct PhysEntry {
  const char* name;
  const PhysiologyParams* p;
  double beta_ath;
  double initial;
};

std::vector<PhysEntry> physiology(const CHDConfig& cfg) {
  return {{"BMI", &cfg.bmi, cfg.beta_bmi, cfg.initial_bmi},
          {"LDL", &cfg.ldl, cfg.beta_ldl, cfg.initial_ldl},
          {"CRP", &cfg.crp, cfg.beta_crp, cfg.initial_crp},
          {"SBP", &cfg.sbp, cfg.beta_sbp, cfg.initial_sbp}};
}

}  // namespace

SystemSpec build_chd_system(const CHDConfig& cfg) {
  check_config(cfg);

  SystemSpec s;
  s.name = "chd-lifecourse";
  s.horizon = cfg.horizon;
  s.inputs.push_back({"Smoking", cfg.smoking});
  s.inputs.push_back({"Activity", cfg.activity});
  s.inputs.push_back({"Diet", cfg.diet});

  if (!cfg.equilibrium) {
    for (const auto& e : physiology(cfg)) {
      LinearForm target;
      target.intercept = e.p->mu0;
      append_nonzero(target, "Smoking", e.p->beta_smoking);
      append_nonzero(target, "Activity", e.p->beta_activity);
      append_nonzero(target, "Diet", e.p->beta_diet);
      s.processes.push_back(ProcessSpec::make_ou(
          e.name, e.p->theta, e.p->sigma, std::move(target), e.initial));
    }
    LinearForm drift;
    drift.intercept = cfg.lambda0;
    for (const auto& e : physiology(cfg))
      append_nonzero(drift, e.name, e.beta_ath);
    s.processes.push_back(ProcessSpec::make_drift_diffusion(
        "Ath", std::move(drift), cfg.sigma_a, cfg.initial_atheroma));
  } else {
    // equilibrium shortcut: the physiology sits on its moving target, so the
    // atheroma drift is linear in the lifestyle inputs directly
    LinearForm drift;
    drift.intercept = cfg.lambda0;
    double beta_smoking = 0.0, beta_activity = 0.0, beta_diet = 0.0;
    for (const auto& e : physiology(cfg)) {
      drift.intercept += e.beta_ath * e.p->mu0;
      beta_smoking += e.beta_ath * e.p->beta_smoking;
      beta_activity += e.beta_ath * e.p->beta_activity;
      beta_diet += e.beta_ath * e.p->beta_diet;
    }
    append_nonzero(drift, "Smoking", beta_smoking);
    append_nonzero(drift, "Activity", beta_activity);
    append_nonzero(drift, "Diet", beta_diet);
    s.processes.push_back(ProcessSpec::make_drift_diffusion(
        "Ath", std::move(drift), cfg.sigma_a, cfg.initial_atheroma));
  }

  s.processes.push_back(
      ProcessSpec::make_threshold_event("CHD", "Ath", cfg.eta));

  ValidationReport rep = validate_system(s);
  if (!rep.ok())
    throw std::invalid_argument("invalid CHD configuration:\n" +
                                rep.to_string());
  return s;
}

double beta_t(double beta, double theta, double t) {
  if (!(theta > 0.0))
    throw std::invalid_argument("beta_t requires theta > 0");
  if (t < 0.0) throw std::invalid_argument("beta_t requires t >= 0");
  return beta * (1.0 - std::exp(-theta * t));
}

double atheroma_contrast(const CHDConfig& cfg, const StepFunction& s,
                         const StepFunction& s_alt, double t) {
  if (!s.is_constant() || !s_alt.is_constant())
    throw std::invalid_argument(
        "closed-form contrast needs constant smoking trajectories; use the "
        "Monte Carlo path for time-varying inputs");
  double bracket = 0.0;
  for (const auto& e : physiology(cfg))
    bracket += beta_t(e.beta_ath, e.p->theta, t) * e.p->beta_smoking;
  return bracket * (s(0.0) - s_alt(0.0));
}

double ig_pdf(const IGParams& p, double t) {
  if (!(p.eta > 0.0))
    throw std::invalid_argument("barrier eta must be positive");
  if (!(t > 0.0)) throw std::domain_error("ig_pdf requires t > 0");
  const double d = p.eta - p.lambda * t;
  const double log_pdf =
      std::log(p.eta) - 0.5 * (kLog2Pi + 3.0 * std::log(t)) -
      d * d / (2.0 * t);
  return std::exp(log_pdf);
}

double ig_survival(const IGParams& p, double t, double tol) {
  if (!(p.eta > 0.0))
    throw std::invalid_argument("barrier eta must be positive");
  if (t < 0.0) throw std::domain_error("ig_survival requires t >= 0");
  if (t == 0.0) return 1.0;
  auto f = [&](double u) { return u <= 0.0 ? 0.0 : ig_pdf(p, u); };
  const double mass = adaptive_simpson(f, 0.0, t, tol);
  return std::min(1.0, std::max(0.0, 1.0 - mass));
}

double chd_hazard(const IGParams& p, double t, double tol) {
  if (t == 0.0) return 0.0;  // density vanishes at the origin
  const double s = ig_survival(p, t, tol);
  if (s <= 1e-12)
    throw std::domain_error("survival numerically zero; hazard undefined");
  return ig_pdf(p, t) / s;
}

double ig_pdf_mass(const IGParams& p, double tol) {
  if (!(p.eta > 0.0))
    throw std::invalid_argument("barrier eta must be positive");
  if (!(p.lambda > 0.0))
    throw std::invalid_argument(
        "mass quadrature needs positive drift (the law is defective "
        "otherwise)");
  // (eta - lambda t)^2 / (2t) >= lambda^2 t / 2 - eta lambda gives an
  // integrable envelope for the tail beyond T
  auto tail_bound = [&](double T) {
    return p.eta * std::exp(p.eta * p.lambda) /
           std::sqrt(2.0 * M_PI * T * T * T) * (2.0 / (p.lambda * p.lambda)) *
           std::exp(-0.5 * p.lambda * p.lambda * T);
  };
  double T = std::max(4.0 * p.eta / p.lambda, 1.0);
  for (int i = 0; i < 200 && tail_bound(T) > 0.1 * tol; ++i) T *= 2.0;
  auto f = [&](double u) { return u <= 0.0 ? 0.0 : ig_pdf(p, u); };
  return adaptive_simpson(f, 0.0, T, 0.5 * tol);
}

double ig_hitting_probability(const IGParams& p) {
  if (!(p.eta > 0.0))
    throw std::invalid_argument("barrier eta must be positive");
  return p.lambda >= 0.0 ? 1.0 : std::exp(2.0 * p.eta * p.lambda);
}

IGParams chd_ig_params(const CHDConfig& cfg) {
  if (!cfg.smoking.is_constant() || !cfg.activity.is_constant() ||
      !cfg.diet.is_constant())
    throw std::invalid_argument(
        "analytic reduction needs constant lifestyle inputs");
  if (!(cfg.sigma_a > 0.0))
    throw std::invalid_argument("analytic reduction needs sigma_a > 0");
  double lambda = cfg.lambda0;
  for (const auto& e : physiology(cfg)) {
    const double mu_eq = e.p->mu0 + e.p->beta_smoking * cfg.smoking(0.0) +
                         e.p->beta_activity * cfg.activity(0.0) +
                         e.p->beta_diet * cfg.diet(0.0);
    lambda += e.beta_ath * mu_eq;
  }
  return {(cfg.eta - cfg.initial_atheroma) / cfg.sigma_a,
          lambda / cfg.sigma_a};
}

namespace {

bool phys_equal(const PhysiologyParams& a, const PhysiologyParams& b) {
  return a.theta == b.theta && a.sigma == b.sigma && a.mu0 == b.mu0 &&
         a.beta_smoking == b.beta_smoking &&
         a.beta_activity == b.beta_activity && a.beta_diet == b.beta_diet;
}

bool same_but_lifestyle(const CHDConfig& a, const CHDConfig& b) {
  return phys_equal(a.bmi, b.bmi) && phys_equal(a.ldl, b.ldl) &&
         phys_equal(a.crp, b.crp) && phys_equal(a.sbp, b.sbp) &&
         a.lambda0 == b.lambda0 && a.beta_bmi == b.beta_bmi &&
         a.beta_ldl == b.beta_ldl && a.beta_crp == b.beta_crp &&
         a.beta_sbp == b.beta_sbp && a.sigma_a == b.sigma_a &&
         a.eta == b.eta && a.horizon == b.horizon &&
         a.initial_bmi == b.initial_bmi && a.initial_ldl == b.initial_ldl &&
         a.initial_crp == b.initial_crp && a.initial_sbp == b.initial_sbp &&
         a.initial_atheroma == b.initial_atheroma &&
         a.equilibrium == b.equilibrium;
}

bool constant_lifestyle(const CHDConfig& cfg) {
  return cfg.smoking.is_constant() && cfg.activity.is_constant() &&
         cfg.diet.is_constant();
}

}  // namespace

CHDDemoReport chd_demo(const CHDConfig& cfg, const CHDConfig& cfg_alt,
                       const SimConfig& sim) {
  if (!same_but_lifestyle(cfg, cfg_alt))
    throw std::invalid_argument(
        "demo configurations must differ only in lifestyle inputs");

  const SystemSpec sys_a = build_chd_system(cfg);
  const SystemSpec sys_b = build_chd_system(cfg_alt);

  SimConfig run = sim;
  run.stop_on_event = "CHD";  // absorbing event: the replicate ends with CHD

  const EnsembleSummary a = simulate_ensemble(sys_a, run);
  const EnsembleSummary b = simulate_ensemble(sys_b, run);

  CHDDemoReport r;
  r.grid = a.grid;
  r.replications = run.replications;
  r.seed = run.seed;
  r.diagnostics_a = a.diagnostics;
  r.diagnostics_b = b.diagnostics;

  const auto& sa = a.survival.at("CHD");
  const auto& sb = b.survival.at("CHD");
  const std::size_t G = r.grid.size();
  r.p_mc_a.resize(G);
  r.p_mc_b.resize(G);
  r.stderr_a = sa.survival_stderr;
  r.stderr_b = sb.survival_stderr;
  r.contrast.resize(G);
  r.contrast_stderr.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    r.p_mc_a[g] = 1.0 - sa.survival[g];
    r.p_mc_b[g] = 1.0 - sb.survival[g];
    r.contrast[g] = r.p_mc_a[g] - r.p_mc_b[g];
    r.contrast_stderr[g] = std::sqrt(r.stderr_a[g] * r.stderr_a[g] +
                                     r.stderr_b[g] * r.stderr_b[g]);
  }

  if (constant_lifestyle(cfg) && constant_lifestyle(cfg_alt) &&
      cfg.sigma_a > 0.0) {
    const IGParams ig_a = chd_ig_params(cfg);
    const IGParams ig_b = chd_ig_params(cfg_alt);
    r.p_ig_a.resize(G);
    r.p_ig_b.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
      r.p_ig_a[g] = 1.0 - ig_survival(ig_a, r.grid[g]);
      r.p_ig_b[g] = 1.0 - ig_survival(ig_b, r.grid[g]);
    }
    r.analytic = true;
  }
  return r;
}

}  // namespace stochsys
