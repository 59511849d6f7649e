#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "stochsys/chd.hpp"
#include "stochsys/effects.hpp"
#include "stochsys/graph.hpp"
#include "stochsys/simulate.hpp"
#include "stochsys/types.hpp"

namespace stochsys {

// system.json schema: top-level keys name, horizon, processes[], inputs[],
// attributes[]; each process carries "kind" plus its kind-specific parameter
// fields. Unknown keys are rejected (ParseError names the offending key).
nlohmann::json system_to_json(const SystemSpec& spec);
SystemSpec system_from_json(const nlohmann::json& j);

SystemSpec load_system(const std::string& path);

// {"target": ..., "control": {step function}}
Intervention intervention_from_json(const nlohmann::json& j);
Intervention load_intervention(const std::string& path);

// Bare step-function object ({"kind": "constant", "values": [v]} or
// {"kind": "piecewise-constant", "breakpoints": [...], "values": [...]}).
StepFunction step_function_from_json(const nlohmann::json& j);
nlohmann::json step_function_to_json(const StepFunction& f);

CHDConfig chd_config_from_json(const nlohmann::json& j);
nlohmann::json chd_config_to_json(const CHDConfig& cfg);
CHDConfig load_chd_config(const std::string& path);

nlohmann::json summary_to_json(const EnsembleSummary& s);
nlohmann::json effect_report_to_json(const EffectReport& r);
nlohmann::json chd_report_to_json(const CHDDemoReport& r);

// Long-format trajectory rows: replicate,time,process,value (counting-like
// processes report their cumulative count). Doubles printed with %.17g so
// identical runs produce identical bytes.
void write_trajectory_csv_header(std::ostream& os);
void write_trajectory_csv_rows(std::ostream& os, const SystemSpec& spec,
                               const Trajectory& path);

// t,value_f,value_f_alt,contrast,stderr; undefined contrasts print nan.
void write_effect_curves_csv(std::ostream& os, const EffectReport& r);

// t,P_MC,P_IG,contrast,stderr for the primary configuration.
void write_chd_curves_csv(std::ostream& os, const CHDDemoReport& r);

}  // namespace stochsys
