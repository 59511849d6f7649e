#include "stochsys/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace stochsys {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
}

void reject_unknown_keys(const json& j, const std::string& ctx,
                         std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ParseError(ctx + ": unknown key '" + it.key() + "'");
  }
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(ctx + ": missing key '" + key + "'");
  return *it;
}

double need_number(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number()) throw ParseError(ctx + ": '" + key + "' must be a number");
  return v.get<double>();
}

double opt_number(const json& j, const char* key, double fallback,
                  const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number())
    throw ParseError(ctx + ": '" + key + "' must be a number");
  return it->get<double>();
}

std::string need_string(const json& j, const char* key,
                        const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_string()) throw ParseError(ctx + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw ParseError(ctx + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ParseError(ctx + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// step-function fields shared by bare objects and flattened input functions
StepFunction step_function_from_fields(const json& j, const std::string& ctx) {
  const std::string kind = need_string(j, "kind", ctx);
  StepFunction f;
  if (kind == "constant") {
    f.values = number_array(need(j, "values", ctx), ctx + ".values");
    if (f.values.size() != 1)
      throw ParseError(ctx + ": a constant needs exactly one value");
    if (j.contains("breakpoints") && !j["breakpoints"].empty())
      throw ParseError(ctx + ": a constant takes no breakpoints");
  } else if (kind == "piecewise-constant") {
    f.breakpoints =
        number_array(need(j, "breakpoints", ctx), ctx + ".breakpoints");
    f.values = number_array(need(j, "values", ctx), ctx + ".values");
  } else {
    throw ParseError(ctx + ": kind must be 'constant' or 'piecewise-constant'");
  }
  return f;
}

json step_function_fields(const StepFunction& f) {
  json j;
  if (f.is_constant()) {
    j["kind"] = "constant";
    j["values"] = f.values;
  } else {
    j["kind"] = "piecewise-constant";
    j["breakpoints"] = f.breakpoints;
    j["values"] = f.values;
  }
  return j;
}

LinearForm linear_form_from_json(const json& j, const std::string& ctx) {
  require_object(j, ctx);
  reject_unknown_keys(j, ctx, {"intercept", "terms"});
  LinearForm f;
  f.intercept = opt_number(j, "intercept", 0.0, ctx);
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) throw ParseError(ctx + ": 'terms' must be an array");
    for (const auto& t : j["terms"]) {
      require_object(t, ctx + ".terms");
      reject_unknown_keys(t, ctx + ".terms", {"parent", "coefficient"});
      f.terms.push_back({need_string(t, "parent", ctx + ".terms"),
                         need_number(t, "coefficient", ctx + ".terms")});
    }
  }
  return f;
}

json linear_form_to_json(const LinearForm& f) {
  json j;
  j["intercept"] = f.intercept;
  json terms = json::array();
  for (const auto& t : f.terms)
    terms.push_back({{"parent", t.parent}, {"coefficient", t.coefficient}});
  j["terms"] = std::move(terms);
  return j;
}

std::vector<LinearTerm> terms_from_json(const json& v, const std::string& ctx) {
  if (!v.is_array()) throw ParseError(ctx + ": 'terms' must be an array");
  std::vector<LinearTerm> out;
  for (const auto& t : v) {
    require_object(t, ctx);
    reject_unknown_keys(t, ctx, {"parent", "coefficient"});
    out.push_back({need_string(t, "parent", ctx),
                   need_number(t, "coefficient", ctx)});
  }
  return out;
}

ProcessSpec process_from_json(const json& j) {
  require_object(j, "process");
  const std::string name = need_string(j, "name", "process");
  const std::string ctx = "process '" + name + "'";
  const std::string kind = need_string(j, "kind", ctx);
  ProcessSpec p;
  p.name = name;
  if (kind == "OU") {
    reject_unknown_keys(j, ctx,
                        {"name", "kind", "theta", "sigma", "target",
                         "initial_value"});
    p.params = OUParams{need_number(j, "theta", ctx),
                        need_number(j, "sigma", ctx),
                        linear_form_from_json(need(j, "target", ctx),
                                              ctx + ".target")};
    p.initial_value = opt_number(j, "initial_value", 0.0, ctx);
  } else if (kind == "DriftDiffusion") {
    reject_unknown_keys(j, ctx,
                        {"name", "kind", "drift", "sigma", "initial_value"});
    p.params = DriftDiffusionParams{
        linear_form_from_json(need(j, "drift", ctx), ctx + ".drift"),
        need_number(j, "sigma", ctx)};
    p.initial_value = opt_number(j, "initial_value", 0.0, ctx);
  } else if (kind == "Counting") {
    reject_unknown_keys(j, ctx,
                        {"name", "kind", "intensity_form", "baseline", "terms",
                         "at_risk", "initial_value"});
    CountingParams cp;
    const std::string form = need_string(j, "intensity_form", ctx);
    if (form == "additive")
      cp.intensity_form = IntensityForm::Additive;
    else if (form == "multiplicative")
      cp.intensity_form = IntensityForm::Multiplicative;
    else
      throw ParseError(ctx +
                       ": intensity_form must be 'additive' or "
                       "'multiplicative'");
    const json& base = need(j, "baseline", ctx);
    require_object(base, ctx + ".baseline");
    reject_unknown_keys(base, ctx + ".baseline",
                        {"kind", "breakpoints", "values"});
    cp.baseline = step_function_from_fields(base, ctx + ".baseline");
    if (j.contains("terms")) cp.terms = terms_from_json(j["terms"], ctx);
    cp.at_risk = static_cast<long>(opt_number(j, "at_risk", 1.0, ctx));
    p.params = std::move(cp);
    p.initial_value = opt_number(j, "initial_value", 0.0, ctx);
  } else if (kind == "ThresholdEvent") {
    reject_unknown_keys(j, ctx, {"name", "kind", "monitored", "eta"});
    p.params = ThresholdEventParams{need_string(j, "monitored", ctx),
                                    need_number(j, "eta", ctx)};
  } else {
    throw ParseError(ctx + ": unknown kind '" + kind + "'");
  }
  return p;
}

json process_to_json(const ProcessSpec& p) {
  json j;
  j["name"] = p.name;
  j["kind"] = std::string(to_string(p.kind()));
  switch (p.kind()) {
    case ProcessKind::OU:
      j["theta"] = p.ou().theta;
      j["sigma"] = p.ou().sigma;
      j["target"] = linear_form_to_json(p.ou().target);
      j["initial_value"] = p.initial_value;
      break;
    case ProcessKind::DriftDiffusion:
      j["drift"] = linear_form_to_json(p.drift_diffusion().drift);
      j["sigma"] = p.drift_diffusion().sigma;
      j["initial_value"] = p.initial_value;
      break;
    case ProcessKind::Counting: {
      const auto& cp = p.counting();
      j["intensity_form"] = std::string(to_string(cp.intensity_form));
      j["baseline"] = step_function_fields(cp.baseline);
      json terms = json::array();
      for (const auto& t : cp.terms)
        terms.push_back({{"parent", t.parent}, {"coefficient", t.coefficient}});
      j["terms"] = std::move(terms);
      j["at_risk"] = cp.at_risk;
      break;
    }
    case ProcessKind::ThresholdEvent:
      j["monitored"] = p.threshold().monitored;
      j["eta"] = p.threshold().eta;
      break;
  }
  return j;
}

}  // namespace

StepFunction step_function_from_json(const json& j) {
  require_object(j, "step function");
  reject_unknown_keys(j, "step function", {"kind", "breakpoints", "values"});
  return step_function_from_fields(j, "step function");
}

json step_function_to_json(const StepFunction& f) {
  return step_function_fields(f);
}

SystemSpec system_from_json(const json& j) {
  require_object(j, "system");
  reject_unknown_keys(j, "system",
                      {"name", "horizon", "processes", "inputs", "attributes"});
  SystemSpec s;
  s.name = need_string(j, "name", "system");
  s.horizon = need_number(j, "horizon", "system");
  const json& procs = need(j, "processes", "system");
  if (!procs.is_array()) throw ParseError("system: 'processes' must be an array");
  for (const auto& p : procs) s.processes.push_back(process_from_json(p));
  if (j.contains("inputs")) {
    if (!j["inputs"].is_array())
      throw ParseError("system: 'inputs' must be an array");
    for (const auto& f : j["inputs"]) {
      require_object(f, "input");
      reject_unknown_keys(f, "input",
                          {"name", "kind", "breakpoints", "values"});
      const std::string name = need_string(f, "name", "input");
      s.inputs.push_back(
          {name, step_function_from_fields(f, "input '" + name + "'")});
    }
  }
  if (j.contains("attributes")) {
    if (!j["attributes"].is_array())
      throw ParseError("system: 'attributes' must be an array");
    for (const auto& a : j["attributes"]) {
      require_object(a, "attribute");
      reject_unknown_keys(a, "attribute", {"name", "value"});
      s.attributes.push_back({need_string(a, "name", "attribute"),
                              need_number(a, "value", "attribute")});
    }
  }
  return s;
}

json system_to_json(const SystemSpec& s) {
  json j;
  j["name"] = s.name;
  j["horizon"] = s.horizon;
  json procs = json::array();
  for (const auto& p : s.processes) procs.push_back(process_to_json(p));
  j["processes"] = std::move(procs);
  json inputs = json::array();
  for (const auto& f : s.inputs) {
    json o = step_function_fields(f.curve);
    o["name"] = f.name;
    inputs.push_back(std::move(o));
  }
  j["inputs"] = std::move(inputs);
  json attrs = json::array();
  for (const auto& a : s.attributes)
    attrs.push_back({{"name", a.name}, {"value", a.value}});
  j["attributes"] = std::move(attrs);
  return j;
}

SystemSpec load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
  return system_from_json(j);
}

Intervention intervention_from_json(const json& j) {
  require_object(j, "intervention");
  reject_unknown_keys(j, "intervention", {"target", "control"});
  Intervention iv;
  iv.target = need_string(j, "target", "intervention");
  const json& c = need(j, "control", "intervention");
  require_object(c, "intervention.control");
  reject_unknown_keys(c, "intervention.control",
                      {"kind", "breakpoints", "values"});
  iv.control =
      InputFunction{iv.target, step_function_from_fields(c, "intervention.control")};
  return iv;
}

Intervention load_intervention(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
  return intervention_from_json(j);
}

namespace {

PhysiologyParams physiology_from_json(const json& j, const PhysiologyParams& d,
                                      const std::string& ctx) {
  require_object(j, ctx);
  reject_unknown_keys(j, ctx,
                      {"theta", "sigma", "mu0", "beta_smoking",
                       "beta_activity", "beta_diet"});
  PhysiologyParams p = d;
  p.theta = opt_number(j, "theta", d.theta, ctx);
  p.sigma = opt_number(j, "sigma", d.sigma, ctx);
  p.mu0 = opt_number(j, "mu0", d.mu0, ctx);
  p.beta_smoking = opt_number(j, "beta_smoking", d.beta_smoking, ctx);
  p.beta_activity = opt_number(j, "beta_activity", d.beta_activity, ctx);
  p.beta_diet = opt_number(j, "beta_diet", d.beta_diet, ctx);
  return p;
}

json physiology_to_json(const PhysiologyParams& p) {
  return {{"theta", p.theta},          {"sigma", p.sigma},
          {"mu0", p.mu0},              {"beta_smoking", p.beta_smoking},
          {"beta_activity", p.beta_activity}, {"beta_diet", p.beta_diet}};
}

}  // namespace

CHDConfig chd_config_from_json(const json& j) {
  require_object(j, "chd config");
  reject_unknown_keys(j, "chd config",
                      {"bmi", "ldl", "crp", "sbp", "atheroma", "eta",
                       "horizon", "smoking", "activity", "diet",
                       "initial_values", "equilibrium"});
  CHDConfig cfg;
  if (j.contains("bmi"))
    cfg.bmi = physiology_from_json(j["bmi"], cfg.bmi, "chd config.bmi");
  if (j.contains("ldl"))
    cfg.ldl = physiology_from_json(j["ldl"], cfg.ldl, "chd config.ldl");
  if (j.contains("crp"))
    cfg.crp = physiology_from_json(j["crp"], cfg.crp, "chd config.crp");
  if (j.contains("sbp"))
    cfg.sbp = physiology_from_json(j["sbp"], cfg.sbp, "chd config.sbp");
  if (j.contains("atheroma")) {
    const json& a = j["atheroma"];
    const std::string ctx = "chd config.atheroma";
    require_object(a, ctx);
    reject_unknown_keys(a, ctx,
                        {"lambda0", "beta_bmi", "beta_ldl", "beta_crp",
                         "beta_sbp", "sigma"});
    cfg.lambda0 = opt_number(a, "lambda0", cfg.lambda0, ctx);
    cfg.beta_bmi = opt_number(a, "beta_bmi", cfg.beta_bmi, ctx);
    cfg.beta_ldl = opt_number(a, "beta_ldl", cfg.beta_ldl, ctx);
    cfg.beta_crp = opt_number(a, "beta_crp", cfg.beta_crp, ctx);
    cfg.beta_sbp = opt_number(a, "beta_sbp", cfg.beta_sbp, ctx);
    cfg.sigma_a = opt_number(a, "sigma", cfg.sigma_a, ctx);
  }
  cfg.eta = opt_number(j, "eta", cfg.eta, "chd config");
  cfg.horizon = opt_number(j, "horizon", cfg.horizon, "chd config");
  if (j.contains("smoking"))
    cfg.smoking = step_function_from_json(j["smoking"]);
  if (j.contains("activity"))
    cfg.activity = step_function_from_json(j["activity"]);
  if (j.contains("diet")) cfg.diet = step_function_from_json(j["diet"]);
  if (j.contains("initial_values")) {
    const json& iv = j["initial_values"];
    const std::string ctx = "chd config.initial_values";
    require_object(iv, ctx);
    reject_unknown_keys(iv, ctx, {"bmi", "ldl", "crp", "sbp", "atheroma"});
    cfg.initial_bmi = opt_number(iv, "bmi", cfg.initial_bmi, ctx);
    cfg.initial_ldl = opt_number(iv, "ldl", cfg.initial_ldl, ctx);
    cfg.initial_crp = opt_number(iv, "crp", cfg.initial_crp, ctx);
    cfg.initial_sbp = opt_number(iv, "sbp", cfg.initial_sbp, ctx);
    cfg.initial_atheroma = opt_number(iv, "atheroma", cfg.initial_atheroma, ctx);
  }
  if (j.contains("equilibrium")) {
    if (!j["equilibrium"].is_boolean())
      throw ParseError("chd config: 'equilibrium' must be a boolean");
    cfg.equilibrium = j["equilibrium"].get<bool>();
  }
  return cfg;
}

json chd_config_to_json(const CHDConfig& cfg) {
  json j;
  j["bmi"] = physiology_to_json(cfg.bmi);
  j["ldl"] = physiology_to_json(cfg.ldl);
  j["crp"] = physiology_to_json(cfg.crp);
  j["sbp"] = physiology_to_json(cfg.sbp);
  j["atheroma"] = {{"lambda0", cfg.lambda0}, {"beta_bmi", cfg.beta_bmi},
                   {"beta_ldl", cfg.beta_ldl}, {"beta_crp", cfg.beta_crp},
                   {"beta_sbp", cfg.beta_sbp}, {"sigma", cfg.sigma_a}};
  j["eta"] = cfg.eta;
  j["horizon"] = cfg.horizon;
  j["smoking"] = step_function_fields(cfg.smoking);
  j["activity"] = step_function_fields(cfg.activity);
  j["diet"] = step_function_fields(cfg.diet);
  j["initial_values"] = {{"bmi", cfg.initial_bmi}, {"ldl", cfg.initial_ldl},
                         {"crp", cfg.initial_crp}, {"sbp", cfg.initial_sbp},
                         {"atheroma", cfg.initial_atheroma}};
  j["equilibrium"] = cfg.equilibrium;
  return j;
}

CHDConfig load_chd_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
  return chd_config_from_json(j);
}

json summary_to_json(const EnsembleSummary& s) {
  json j;
  j["seed"] = s.seed;
  j["replications"] = s.replications;
  j["step"] = s.step;
  j["grid"] = s.grid;
  json procs;
  for (std::size_t i = 0; i < s.process_names.size(); ++i) {
    json p;
    p["kind"] = std::string(to_string(s.process_kinds[i]));
    p["mean"] = s.mean[i];
    p["variance"] = s.variance[i];
    const auto& name = s.process_names[i];
    if (auto it = s.survival.find(name); it != s.survival.end()) {
      p["survival"] = it->second.survival;
      p["survival_stderr"] = it->second.survival_stderr;
      p["cum_hazard"] = it->second.cum_hazard;
    }
    if (auto it = s.hitting.find(name); it != s.hitting.end()) {
      p["hitting"] = {{"times", it->second.times},
                      {"censored", it->second.censored},
                      {"total", it->second.total}};
    }
    procs[name] = std::move(p);
  }
  j["processes"] = std::move(procs);
  j["diagnostics"] = {
      {"clamped_intensities", s.diagnostics.clamped_intensities},
      {"acceptance_overflow", s.diagnostics.acceptance_overflow},
      {"max_lambda_h", s.diagnostics.max_lambda_h}};
  return j;
}

json effect_report_to_json(const EffectReport& r) {
  json j;
  j["kind"] = r.kind;
  j["contrast"] =
      r.contrast == ContrastKind::Additive ? "additive" : "multiplicative";
  j["target"] = r.target;
  j["intervened"] = r.intervened;
  j["monte_carlo"] = r.monte_carlo;
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  j["grid"] = r.grid;
  j["value_f"] = r.value_f;
  j["value_f_alt"] = r.value_f_alt;
  j["contrast_curve"] = r.contrast_curve;
  if (r.monte_carlo) j["mc_stderr"] = r.mc_stderr;
  return j;
}

json chd_report_to_json(const CHDDemoReport& r) {
  json j;
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  j["analytic"] = r.analytic;
  j["grid"] = r.grid;
  j["p_mc_a"] = r.p_mc_a;
  j["p_mc_b"] = r.p_mc_b;
  j["stderr_a"] = r.stderr_a;
  j["stderr_b"] = r.stderr_b;
  j["contrast"] = r.contrast;
  j["contrast_stderr"] = r.contrast_stderr;
  if (r.analytic) {
    j["p_ig_a"] = r.p_ig_a;
    j["p_ig_b"] = r.p_ig_b;
  }
  auto diag = [](const Diagnostics& d) {
    return json{{"clamped_intensities", d.clamped_intensities},
                {"acceptance_overflow", d.acceptance_overflow},
                {"max_lambda_h", d.max_lambda_h}};
  };
  j["diagnostics_a"] = diag(r.diagnostics_a);
  j["diagnostics_b"] = diag(r.diagnostics_b);
  return j;
}

namespace {

// %.17g round-trips doubles, so equal values always print equal bytes
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory_csv_header(std::ostream& os) {
  os << "replicate,time,process,value\n";
}

void write_trajectory_csv_rows(std::ostream& os, const SystemSpec& spec,
                               const Trajectory& path) {
  for (std::size_t g = 0; g < path.grid.size(); ++g) {
    for (std::size_t i = 0; i < spec.processes.size(); ++i) {
      const auto& p = spec.processes[i];
      os << path.replicate << ',' << fmt(path.grid[g]) << ',' << p.name << ',';
      if (p.is_continuous())
        os << fmt(path.values[i][g]);
      else
        os << path.counts[i][g];
      os << '\n';
    }
  }
}

void write_effect_curves_csv(std::ostream& os, const EffectReport& r) {
  os << "t,value_f,value_f_alt,contrast,stderr\n";
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    os << fmt(r.grid[g]) << ',' << fmt(r.value_f[g]) << ','
       << fmt(r.value_f_alt[g]) << ',' << fmt(r.contrast_curve[g]) << ','
       << (r.mc_stderr.empty() ? "nan" : fmt(r.mc_stderr[g])) << '\n';
  }
}

void write_chd_curves_csv(std::ostream& os, const CHDDemoReport& r) {
  os << "t,P_MC,P_IG,contrast,stderr\n";
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    os << fmt(r.grid[g]) << ',' << fmt(r.p_mc_a[g]) << ','
       << (r.analytic ? fmt(r.p_ig_a[g]) : "nan") << ',' << fmt(r.contrast[g])
       << ',' << fmt(r.contrast_stderr[g]) << '\n';
  }
}

}  // namespace stochsys
