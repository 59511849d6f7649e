#include "stochsys/validate.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace stochsys {

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& e : errors) os << "error: " << e.where << ": " << e.message << "\n";
  for (const auto& w : warnings) os << "warning: " << w.where << ": " << w.message << "\n";
  if (errors.empty() && warnings.empty()) os << "ok\n";
  return os.str();
}

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

ValidationReport validate_system(const SystemSpec& spec) {
  ValidationReport rep;
  auto err = [&](const std::string& where, const std::string& msg) {
    rep.errors.push_back({where, msg});
  };
  auto warn = [&](const std::string& where, const std::string& msg) {
    rep.warnings.push_back({where, msg});
  };

  if (!finite(spec.horizon) || spec.horizon <= 0.0)
    err(spec.name, "horizon must be positive");
  if (spec.processes.empty()) err(spec.name, "system has no processes");

  std::map<std::string, int> name_count;
  for (const auto& p : spec.processes) ++name_count[p.name];
  for (const auto& f : spec.inputs) ++name_count[f.name];
  for (const auto& a : spec.attributes) ++name_count[a.name];
  for (const auto& [n, c] : name_count)
    if (c > 1) err(n, "duplicate name");

  auto resolves = [&](const std::string& n) {
    return name_count.count(n) != 0;
  };

  auto check_step_function = [&](const StepFunction& f,
                                 const std::string& where) {
    if (f.values.size() != f.breakpoints.size() + 1) {
      err(where, "step function needs breakpoints.size() + 1 values");
      return;
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < f.breakpoints.size(); ++i) {
      const double b = f.breakpoints[i];
      if (!finite(b) || b <= prev) {
        err(where, "breakpoints must be strictly increasing and positive");
        return;
      }
      if (b > spec.horizon)
        warn(where, "breakpoint beyond the horizon is never reached");
      prev = b;
    }
    for (double v : f.values)
      if (!finite(v)) err(where, "non-finite step function value");
  };

  auto check_terms = [&](const std::vector<LinearTerm>& terms,
                         const std::string& where) {
    std::set<std::string> seen;
    for (const auto& t : terms) {
      if (!seen.insert(t.parent).second)
        err(where, "parent '" + t.parent + "' appears twice in linear form");
      if (!resolves(t.parent))
        err(where, "unresolved parent '" + t.parent + "'");
      if (!finite(t.coefficient))
        err(where, "non-finite coefficient on parent '" + t.parent + "'");
      else if (t.coefficient == 0.0)
        warn(where, "zero coefficient on parent '" + t.parent +
                        "' (term kept, influence edge remains)");
    }
  };

  for (const auto& f : spec.inputs) check_step_function(f.curve, f.name);
  for (const auto& a : spec.attributes)
    if (!finite(a.value)) err(a.name, "non-finite attribute value");

  for (const auto& p : spec.processes) {
    if (!finite(p.initial_value)) err(p.name, "non-finite initial value");
    switch (p.kind()) {
      case ProcessKind::OU: {
        const auto& q = p.ou();
        if (!finite(q.theta) || q.theta <= 0.0) {
          std::ostringstream os;
          os << "nonpositive reversion rate (theta = " << q.theta << ")";
          err(p.name, os.str());
        }
        if (!finite(q.sigma) || q.sigma < 0.0) err(p.name, "negative sigma");
        if (!finite(q.target.intercept))
          err(p.name, "non-finite target intercept");
        check_terms(q.target.terms, p.name);
        break;
      }
      case ProcessKind::DriftDiffusion: {
        const auto& q = p.drift_diffusion();
        if (!finite(q.sigma) || q.sigma < 0.0) err(p.name, "negative sigma");
        if (!finite(q.drift.intercept))
          err(p.name, "non-finite drift intercept");
        check_terms(q.drift.terms, p.name);
        break;
      }
      case ProcessKind::Counting: {
        const auto& q = p.counting();
        if (q.at_risk < 1) err(p.name, "at_risk must be >= 1");
        if (p.initial_value != 0.0)
          err(p.name, "counting process must start at 0");
        check_step_function(q.baseline, p.name);
        if (q.intensity_form == IntensityForm::Multiplicative)
          for (double v : q.baseline.values)
            if (v < 0.0)
              err(p.name, "negative baseline for multiplicative intensity");
        check_terms(q.terms, p.name);
        break;
      }
      case ProcessKind::ThresholdEvent: {
        const auto& q = p.threshold();
        if (!finite(q.eta)) err(p.name, "non-finite threshold");
        const ProcessSpec* m = spec.find_process(q.monitored);
        if (!m)
          err(p.name, "unresolved parent '" + q.monitored + "'");
        else if (!m->is_continuous())
          err(p.name, "monitored process '" + q.monitored +
                          "' must be a continuous process");
        break;
      }
    }
  }

  // A threshold event must not feed back into the process it monitors:
  // degradation loops would make the hitting time ill-defined.
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& p : spec.processes)
    for (const auto& parent : p.parents()) children[parent].push_back(p.name);
  for (const auto& p : spec.processes) {
    if (p.kind() != ProcessKind::ThresholdEvent) continue;
    std::set<std::string> reached;
    std::vector<std::string> stack{p.name};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      for (const auto& c : children[cur])
        if (reached.insert(c).second) stack.push_back(c);
    }
    if (reached.count(p.threshold().monitored))
      err(p.name, "threshold event is an ancestor of its monitored process '" +
                      p.threshold().monitored + "'");
  }

  std::set<std::string> referenced;
  for (const auto& p : spec.processes)
    for (const auto& parent : p.parents()) referenced.insert(parent);
  for (const auto& f : spec.inputs)
    if (!referenced.count(f.name))
      warn(f.name, "input is never referenced");

  return rep;
}

}  // namespace stochsys
