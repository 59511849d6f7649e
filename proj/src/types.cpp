#include "stochsys/types.hpp"

namespace stochsys {

std::string_view to_string(ProcessKind k) {
  switch (k) {
    case ProcessKind::OU:
      return "OU";
    case ProcessKind::DriftDiffusion:
      return "DriftDiffusion";
    case ProcessKind::Counting:
      return "Counting";
    case ProcessKind::ThresholdEvent:
      return "ThresholdEvent";
  }
  return "?";
}

std::string_view to_string(IntensityForm f) {
  return f == IntensityForm::Additive ? "additive" : "multiplicative";
}

std::vector<std::string> ProcessSpec::parents() const {
  std::vector<std::string> out;
  switch (kind()) {
    case ProcessKind::OU:
      for (const auto& t : ou().target.terms) out.push_back(t.parent);
      break;
    case ProcessKind::DriftDiffusion:
      for (const auto& t : drift_diffusion().drift.terms)
        out.push_back(t.parent);
      break;
    case ProcessKind::Counting:
      for (const auto& t : counting().terms) out.push_back(t.parent);
      break;
    case ProcessKind::ThresholdEvent:
      out.push_back(threshold().monitored);
      break;
  }
  return out;
}

const OUParams& ProcessSpec::ou() const {
  if (const auto* p = std::get_if<OUParams>(&params)) return *p;
  throw std::invalid_argument("process '" + name + "' is not an OU process");
}

const DriftDiffusionParams& ProcessSpec::drift_diffusion() const {
  if (const auto* p = std::get_if<DriftDiffusionParams>(&params)) return *p;
  throw std::invalid_argument("process '" + name +
                              "' is not a drifted diffusion");
}

const CountingParams& ProcessSpec::counting() const {
  if (const auto* p = std::get_if<CountingParams>(&params)) return *p;
  throw std::invalid_argument("process '" + name +
                              "' is not a counting process");
}

const ThresholdEventParams& ProcessSpec::threshold() const {
  if (const auto* p = std::get_if<ThresholdEventParams>(&params)) return *p;
  throw std::invalid_argument("process '" + name +
                              "' is not a threshold event");
}

ProcessSpec ProcessSpec::make_ou(std::string name, double theta, double sigma,
                                 LinearForm target, double initial_value) {
  ProcessSpec p;
  p.name = std::move(name);
  p.initial_value = initial_value;
  p.params = OUParams{theta, sigma, std::move(target)};
  return p;
}

ProcessSpec ProcessSpec::make_drift_diffusion(std::string name,
                                              LinearForm drift, double sigma,
                                              double initial_value) {
  ProcessSpec p;
  p.name = std::move(name);
  p.initial_value = initial_value;
  p.params = DriftDiffusionParams{std::move(drift), sigma};
  return p;
}

ProcessSpec ProcessSpec::make_counting(std::string name, IntensityForm form,
                                       StepFunction baseline,
                                       std::vector<LinearTerm> terms,
                                       long at_risk) {
  ProcessSpec p;
  p.name = std::move(name);
  p.initial_value = 0.0;
  p.params = CountingParams{form, std::move(baseline), std::move(terms),
                            at_risk};
  return p;
}

ProcessSpec ProcessSpec::make_threshold_event(std::string name,
                                              std::string monitored,
                                              double eta) {
  ProcessSpec p;
  p.name = std::move(name);
  p.initial_value = 0.0;
  p.params = ThresholdEventParams{std::move(monitored), eta};
  return p;
}

const ProcessSpec* SystemSpec::find_process(std::string_view n) const {
  for (const auto& p : processes)
    if (p.name == n) return &p;
  return nullptr;
}

const InputFunction* SystemSpec::find_input(std::string_view n) const {
  for (const auto& f : inputs)
    if (f.name == n) return &f;
  return nullptr;
}

const Attribute* SystemSpec::find_attribute(std::string_view n) const {
  for (const auto& a : attributes)
    if (a.name == n) return &a;
  return nullptr;
}

bool SystemSpec::has_name(std::string_view n) const {
  return find_process(n) || find_input(n) || find_attribute(n);
}

}  // namespace stochsys
