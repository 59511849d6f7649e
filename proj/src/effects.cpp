#include "stochsys/effects.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stochsys/eval.hpp"

namespace stochsys {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const ProcessSpec& effect_target(const SystemSpec& spec,
                                 std::string_view target) {
  const ProcessSpec* p = spec.find_process(target);
  if (!p)
    throw std::invalid_argument("unknown effect target '" +
                                std::string(target) + "'");
  if (p->kind() != ProcessKind::Counting &&
      p->kind() != ProcessKind::DriftDiffusion)
    throw std::invalid_argument(
        "effect target must be a counting or drifted-diffusion process");
  return *p;
}

// Intensity for counting targets, drift for diffusion targets; 0-1 counting
// targets are evaluated on their pre-event history.
double target_rate(const ProcessSpec& p, double t,
                   const HistoryView& history) {
  if (p.kind() == ProcessKind::DriftDiffusion)
    return eval_drift(p, t, history);
  if (p.counting().at_risk == 1) {
    ZeroCountHistory pre_event(history, p.name);
    return eval_intensity(p, t, pre_event);
  }
  return eval_intensity(p, t, history);
}

}  // namespace

double apply_contrast(ContrastKind kind, double x, double y) {
  if (kind == ContrastKind::Additive) return x - y;
  if (!(x > 0.0) || !(y > 0.0))
    throw std::domain_error(
        "multiplicative contrast requires strictly positive arguments");
  return x / y;
}

double instantaneous_effect(const SystemSpec& spec, std::string_view target,
                            std::string_view factor, const StepFunction& f,
                            const StepFunction& f_alt, double t,
                            const HistoryView& history,
                            ContrastKind contrast) {
  const ProcessSpec& p = effect_target(spec, target);
  OverlayHistory with_f(history, std::string(factor), f);
  OverlayHistory with_f_alt(history, std::string(factor), f_alt);
  const double x = target_rate(p, t, with_f);
  const double y = target_rate(p, t, with_f_alt);
  return apply_contrast(contrast, x, y);
}

double cumulative_effect(const SystemSpec& spec, std::string_view target,
                         std::string_view factor, const StepFunction& f,
                         const StepFunction& f_alt, double t, double step,
                         const HistoryView& history, ContrastKind contrast) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (t < 0.0) throw std::invalid_argument("t must be nonnegative");
  const ProcessSpec& p = effect_target(spec, target);
  OverlayHistory with_f(history, std::string(factor), f);
  OverlayHistory with_f_alt(history, std::string(factor), f_alt);

  // left-endpoint rectangle rule, matching the t- convention of the
  // intensities
  auto compensator = [&](const HistoryView& h) {
    double acc = 0.0;
    double u = 0.0;
    while (u + step <= t + 1e-12) {
      acc += target_rate(p, u, h) * step;
      u += step;
    }
    if (u < t) acc += target_rate(p, u, h) * (t - u);
    return acc;
  };
  return apply_contrast(contrast, compensator(with_f), compensator(with_f_alt));
}

double marginal_effect_discrete(double p_g1, double s_f_g1, double s_f_g0) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(p_g1) || !in_unit(s_f_g1) || !in_unit(s_f_g0))
    throw std::invalid_argument(
        "marginal_effect_discrete inputs must lie in [0, 1]");
  return p_g1 * s_f_g1 + (1.0 - p_g1) * s_f_g0;
}

EffectReport marginal_effect_mc(const SystemSpec& spec, const Intervention& iv,
                                const Intervention& iv_alt,
                                const SimConfig& cfg, std::string_view target,
                                ContrastKind contrast) {
  if (iv.target != iv_alt.target)
    throw std::invalid_argument(
        "both interventions must target the same process (got '" + iv.target +
        "' and '" + iv_alt.target + "')");
  const ProcessSpec* tp = spec.find_process(target);
  if (!tp)
    throw std::invalid_argument("unknown effect target '" +
                                std::string(target) + "'");

  const SystemSpec sys_f = apply_do(spec, iv);
  const SystemSpec sys_f_alt = apply_do(spec, iv_alt);
  const EnsembleSummary a = simulate_ensemble(sys_f, cfg);
  const EnsembleSummary b = simulate_ensemble(sys_f_alt, cfg);

  EffectReport r;
  r.kind = "marginal";
  r.contrast = contrast;
  r.target = std::string(target);
  r.intervened = iv.target;
  r.monte_carlo = true;
  r.replications = cfg.replications;
  r.seed = cfg.seed;
  r.grid = a.grid;

  const bool survival_target = !tp->is_continuous();
  std::vector<double> se_a(a.grid.size()), se_b(a.grid.size());
  if (survival_target) {
    const auto& sa = a.survival.at(r.target);
    const auto& sb = b.survival.at(r.target);
    r.value_f = sa.survival;
    r.value_f_alt = sb.survival;
    se_a = sa.survival_stderr;
    se_b = sb.survival_stderr;
  } else {
    std::size_t idx = 0;
    while (a.process_names[idx] != r.target) ++idx;
    r.value_f = a.mean[idx];
    r.value_f_alt = b.mean[idx];
    const double n = static_cast<double>(cfg.replications);
    for (std::size_t g = 0; g < a.grid.size(); ++g) {
      se_a[g] = std::sqrt(a.variance[idx][g] / n);
      se_b[g] = std::sqrt(b.variance[idx][g] / n);
    }
  }

  r.contrast_curve.resize(r.grid.size());
  r.mc_stderr.resize(r.grid.size());
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    const double x = r.value_f[g];
    const double y = r.value_f_alt[g];
    if (contrast == ContrastKind::Additive) {
      r.contrast_curve[g] = x - y;
      r.mc_stderr[g] = std::sqrt(se_a[g] * se_a[g] + se_b[g] * se_b[g]);
    } else if (x > 0.0 && y > 0.0) {
      const double ratio = x / y;
      r.contrast_curve[g] = ratio;
      r.mc_stderr[g] =
          std::abs(ratio) * std::sqrt(se_a[g] * se_a[g] / (x * x) +
                                      se_b[g] * se_b[g] / (y * y));
    } else {
      // undefined point, reported as such rather than failing the run
      r.contrast_curve[g] = kNaN;
      r.mc_stderr[g] = kNaN;
    }
  }
  return r;
}

namespace {

std::size_t process_index_of(const SystemSpec& spec, std::string_view name) {
  for (std::size_t i = 0; i < spec.processes.size(); ++i)
    if (spec.processes[i].name == name) return i;
  throw std::invalid_argument("unknown process '" + std::string(name) + "'");
}

}  // namespace

ConditionalEstimate observational_survival(
    const SystemSpec& spec, const SimConfig& cfg, std::string_view target,
    const std::vector<std::pair<std::string, long>>& given, double t) {
  const std::size_t target_idx = process_index_of(spec, target);
  if (spec.processes[target_idx].is_continuous())
    throw std::invalid_argument("survival target must be counting-like");
  std::vector<std::pair<std::size_t, long>> cond;
  cond.reserve(given.size());
  for (const auto& [name, v] : given)
    cond.emplace_back(process_index_of(spec, name), v);

  long n_stratum = 0;
  long n_surviving = 0;
  for_each_trajectory(spec, cfg, [&](const Trajectory& path) {
    for (const auto& [idx, v] : cond)
      if (count_at(path, idx, t) != v) return;
    ++n_stratum;
    if (count_at(path, target_idx, t) == 0) ++n_surviving;
  });

  ConditionalEstimate est;
  est.n = n_stratum;
  if (n_stratum > 0) {
    est.value = static_cast<double>(n_surviving) / static_cast<double>(n_stratum);
    est.stderr_ =
        std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n_stratum));
  }
  return est;
}

ConditionalEstimate event_probability(const SystemSpec& spec,
                                      const SimConfig& cfg,
                                      std::string_view name, long value,
                                      double t) {
  const std::size_t idx = process_index_of(spec, name);
  if (spec.processes[idx].is_continuous())
    throw std::invalid_argument("event probability needs a counting-like process");
  long hits = 0;
  for_each_trajectory(spec, cfg, [&](const Trajectory& path) {
    if (count_at(path, idx, t) == value) ++hits;
  });
  ConditionalEstimate est;
  est.n = cfg.replications;
  est.value = static_cast<double>(hits) / static_cast<double>(cfg.replications);
  est.stderr_ = std::sqrt(est.value * (1.0 - est.value) /
                          static_cast<double>(cfg.replications));
  return est;
}

SystemSpec discrete_confounding_system(const DiscreteExampleParams& p) {
  auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_open_unit(p.p_g1) || !in_open_unit(p.p_f_g1) ||
      !in_open_unit(p.p_f_g0) || !in_open_unit(p.s_f1_g1) ||
      !in_open_unit(p.s_f1_g0) || !in_open_unit(p.s_f0_g0))
    throw std::invalid_argument(
        "discrete example probabilities must lie in (0, 1)");
  if (!(p.t_eval > 0.0) || !(p.step > 0.0) || p.step > p.t_eval / 10.0)
    throw std::invalid_argument("need 0 < step <= t_eval / 10");

  const double h = p.step;
  // constant hazards on [2h, horizon) chosen to hit the requested survivals
  // over an exposure of length t_eval
  const double lam_11 = -std::log(p.s_f1_g1) / p.t_eval;
  const double lam_10 = -std::log(p.s_f1_g0) / p.t_eval;
  const double lam_00 = -std::log(p.s_f0_g0) / p.t_eval;
  const double a = lam_00;
  const double b = lam_10 - lam_00;
  const double c = lam_11 - lam_10;

  SystemSpec spec;
  spec.name = "discrete-confounding";
  spec.horizon = p.t_eval + 2.0 * h;

  // G decides in the first step: jump probability exactly p_g1
  StepFunction g_base{{h}, {p.p_g1 / h, 0.0}};
  spec.processes.push_back(ProcessSpec::make_counting(
      "G", IntensityForm::Additive, std::move(g_base), {}));

  // F decides in the second step, after G has realized; the multiplicative
  // form keeps the intensity at zero outside the window
  StepFunction f_base{{h, 2.0 * h}, {0.0, p.p_f_g0 / h, 0.0}};
  spec.processes.push_back(ProcessSpec::make_counting(
      "F", IntensityForm::Multiplicative, std::move(f_base),
      {{"G", std::log(p.p_f_g1 / p.p_f_g0)}}));

  // D accumulates hazard a + b F + c G once both draws are settled
  StepFunction d_base{{2.0 * h}, {0.0, a}};
  spec.processes.push_back(ProcessSpec::make_counting(
      "D", IntensityForm::Additive, std::move(d_base),
      {{"F", b}, {"G", c}}));

  return spec;
}

}  // namespace stochsys
