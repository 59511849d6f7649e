#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stochsys/chd.hpp"
#include "stochsys/effects.hpp"
#include "stochsys/eval.hpp"
#include "stochsys/graph.hpp"
#include "stochsys/json_io.hpp"
#include "stochsys/simulate.hpp"
#include "stochsys/validate.hpp"
#include "stochsys/version.hpp"

namespace {

using nlohmann::json;
using namespace stochsys;

// domain validation failed: exit code 1
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join_args(int argc, char** argv) {
  std::ostringstream os;
  for (int i = 0; i < argc; ++i) {
    if (i) os << ' ';
    os << argv[i];
  }
  return os.str();
}

json sim_config_json(const SimConfig& cfg) {
  return {{"step", cfg.step},
          {"replications", cfg.replications},
          {"seed", cfg.seed},
          {"record_grid", cfg.record_grid},
          {"threads", cfg.threads},
          {"budget", cfg.budget},
          {"stop_on_event", cfg.stop_on_event}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command) : command_(std::move(command)) {
    start_ = std::chrono::steady_clock::now();
  }
  void add_input(const std::string& p) { inputs_.push_back(p); }
  void add_output(const std::string& p) { outputs_.push_back(p); }
  void set_sim(const SimConfig& cfg) { sim_ = sim_config_json(cfg); }

  void write(const std::string& path) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    json m;
    m["command"] = command_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    if (!sim_.is_null()) m["sim_config"] = sim_;
    m["tool_version"] = kVersion;
    m["wall_clock_seconds"] = secs;
    write_file(path, m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> inputs_, outputs_;
  json sim_;
  std::chrono::steady_clock::time_point start_;
};

SystemSpec load_validated(const std::string& path) {
  SystemSpec spec = load_system(path);
  ValidationReport rep = validate_system(spec);
  if (!rep.ok()) throw ValidationFailure(rep.to_string());
  for (const auto& w : rep.warnings)
    std::cerr << "warning: " << w.where << ": " << w.message << "\n";
  return spec;
}

struct SimFlags {
  double step = 0.01;
  long reps = 1000;
  std::uint64_t seed = 0;
  long record = 1;
  int threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--step", step, "grid step h")->check(CLI::PositiveNumber);
    cmd->add_option("--reps", reps, "replications")
        ->check(CLI::Range(1L, std::numeric_limits<long>::max()));
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--record", record, "record every k-th step")
        ->check(CLI::Range(1L, std::numeric_limits<long>::max()));
    cmd->add_option("--threads", threads, "worker count (0 = all)")
        ->check(CLI::Range(0, 1 << 16));
  }

  SimConfig config() const {
    SimConfig cfg;
    cfg.step = step;
    cfg.replications = reps;
    cfg.seed = seed;
    cfg.record_grid = record;
    cfg.threads = threads;
    cfg.budget = default_budget();
    return cfg;
  }
};

int cmd_validate(const std::string& system_file) {
  SystemSpec spec = load_system(system_file);
  ValidationReport rep = validate_system(spec);
  std::cout << rep.to_string();
  return rep.ok() ? 0 : 1;
}

int cmd_graph(const std::string& system_file,
              const std::vector<std::string>& do_specs,
              const std::string& out_path, ManifestWriter& manifest) {
  SystemSpec spec = load_validated(system_file);
  for (const auto& d : do_specs) {
    const auto eq = d.find('=');
    if (eq == std::string::npos)
      throw ParseError("--do expects target=control_file, got '" + d + "'");
    const std::string target = d.substr(0, eq);
    const std::string file = d.substr(eq + 1);
    manifest.add_input(file);
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open '" + file + "'");
    json cj;
    try {
      in >> cj;
    } catch (const json::exception& e) {
      throw ParseError("malformed JSON in '" + file + "': " + e.what());
    }
    Intervention iv{target, {target, step_function_from_json(cj)}};
    spec = apply_do(spec, iv);
  }
  const std::string dot = to_dot(spec);
  if (out_path.empty()) {
    std::cout << dot;
  } else {
    write_file(out_path, dot);
    manifest.add_output(out_path);
    manifest.write(out_path + ".manifest.json");
  }
  return 0;
}

int cmd_simulate(const std::string& system_file, const SimFlags& flags,
                 const std::string& stop_on, const std::string& out_prefix,
                 ManifestWriter& manifest) {
  SystemSpec spec = load_validated(system_file);
  SimConfig cfg = flags.config();
  cfg.stop_on_event = stop_on;

  EnsembleSummary summary = simulate_ensemble(spec, cfg);
  const std::string summary_path = out_prefix + "_summary.json";
  write_file(summary_path, summary_to_json(summary).dump(2) + "\n");

  const std::string csv_path = out_prefix + "_trajectories.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
  write_trajectory_csv_header(csv);
  for_each_trajectory(spec, cfg, [&](const Trajectory& t) {
    write_trajectory_csv_rows(csv, spec, t);
  });
  csv.close();

  manifest.set_sim(cfg);
  manifest.add_output(summary_path);
  manifest.add_output(csv_path);
  manifest.write(out_prefix + "_manifest.json");
  std::cout << "wrote " << summary_path << " and " << csv_path << "\n";
  return 0;
}

int cmd_effect(const std::string& system_file, const std::string& target,
               const std::string& do_a, const std::string& do_b,
               const std::string& contrast_name, const SimFlags& flags,
               const std::string& out_prefix, ManifestWriter& manifest) {
  SystemSpec spec = load_validated(system_file);
  Intervention iv_a = load_intervention(do_a);
  Intervention iv_b = load_intervention(do_b);
  const ContrastKind contrast = contrast_name == "multiplicative"
                                    ? ContrastKind::Multiplicative
                                    : ContrastKind::Additive;
  SimConfig cfg = flags.config();
  EffectReport report =
      marginal_effect_mc(spec, iv_a, iv_b, cfg, target, contrast);

  const std::string report_path = out_prefix + "_effect.json";
  write_file(report_path, effect_report_to_json(report).dump(2) + "\n");
  const std::string curves_path = out_prefix + "_curves.csv";
  std::ostringstream curves;
  write_effect_curves_csv(curves, report);
  write_file(curves_path, curves.str());

  manifest.set_sim(cfg);
  manifest.add_output(report_path);
  manifest.add_output(curves_path);
  manifest.write(out_prefix + "_manifest.json");
  std::cout << "wrote " << report_path << " and " << curves_path << "\n";
  return 0;
}

int cmd_chd_demo(const std::string& config_file, const std::string& alt_file,
                 bool equilibrium, const SimFlags& flags,
                 const std::string& out_prefix, ManifestWriter& manifest) {
  CHDConfig cfg;
  if (!config_file.empty()) cfg = load_chd_config(config_file);
  CHDConfig alt;
  if (!alt_file.empty()) {
    alt = load_chd_config(alt_file);
  } else {
    // default contrast: same system without smoking
    alt = cfg;
    alt.smoking = StepFunction::constant(0.0);
  }
  if (equilibrium) {
    cfg.equilibrium = true;
    alt.equilibrium = true;
  }

  SimConfig sim = flags.config();
  CHDDemoReport report = chd_demo(cfg, alt, sim);

  const std::string report_path = out_prefix + "_report.json";
  write_file(report_path, chd_report_to_json(report).dump(2) + "\n");
  const std::string curves_path = out_prefix + "_curves.csv";
  std::ostringstream curves;
  write_chd_curves_csv(curves, report);
  write_file(curves_path, curves.str());

  manifest.set_sim(sim);
  manifest.add_output(report_path);
  manifest.add_output(curves_path);
  manifest.write(out_prefix + "_manifest.json");
  std::cout << "wrote " << report_path << " and " << curves_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stochsys: simulation and causal analysis of stochastic systems"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // validate
  std::string v_system;
  CLI::App* validate = app.add_subcommand(
      "validate", "check a system file against its invariants");
  validate->add_option("system", v_system, "system.json")->required();

  // graph
  std::string g_system, g_out;
  std::vector<std::string> g_do;
  CLI::App* graph = app.add_subcommand(
      "graph", "influence graph (optionally after interventions) as DOT");
  graph->add_option("system", g_system, "system.json")->required();
  graph->add_option("--do", g_do,
                    "target=control.json; replace target by the control");
  graph->add_option("--out", g_out, "write DOT here instead of stdout");

  // simulate
  std::string s_system, s_out, s_stop;
  SimFlags s_flags;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo ensemble of a system");
  simulate->add_option("system", s_system, "system.json")->required();
  s_flags.attach(simulate);
  simulate->add_option("--stop-on", s_stop,
                       "counting/threshold process that ends a replicate");
  simulate->add_option("--out", s_out, "output prefix")->required();

  // effect
  std::string e_system, e_target, e_do_a, e_do_b, e_out;
  std::string e_contrast = "additive";
  SimFlags e_flags;
  CLI::App* effect = app.add_subcommand(
      "effect", "marginal causal effect of one intervention versus another");
  effect->add_option("system", e_system, "system.json")->required();
  effect->add_option("--target", e_target, "outcome process")->required();
  effect->add_option("--do-a", e_do_a, "intervention JSON, arm A")->required();
  effect->add_option("--do-b", e_do_b, "intervention JSON, arm B")->required();
  effect->add_option("--contrast", e_contrast, "additive | multiplicative")
      ->check(CLI::IsMember({"additive", "multiplicative"}));
  e_flags.attach(effect);
  effect->add_option("--out", e_out, "output prefix")->required();

  // chd-demo
  std::string c_config, c_alt, c_out;
  bool c_equilibrium = false;
  SimFlags c_flags;
  c_flags.step = 0.01;
  c_flags.reps = 2000;
  CLI::App* chd = app.add_subcommand(
      "chd-demo",
      "coronary-heart-disease lifecourse demo: Monte Carlo incidence vs the "
      "inverse-Gaussian reduction");
  chd->add_option("--config", c_config, "CHD config JSON (defaults built in)");
  chd->add_option("--alt-config", c_alt,
                  "comparison config (default: smoking set to 0)");
  chd->add_flag("--equilibrium", c_equilibrium,
                "replace the physiology by its moving target");
  c_flags.attach(chd);
  chd->add_option("--out", c_out, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ManifestWriter manifest(join_args(argc, argv));
  try {
    if (*validate) return cmd_validate(v_system);
    if (*graph) {
      manifest.add_input(g_system);
      return cmd_graph(g_system, g_do, g_out, manifest);
    }
    if (*simulate) {
      manifest.add_input(s_system);
      return cmd_simulate(s_system, s_flags, s_stop, s_out, manifest);
    }
    if (*effect) {
      manifest.add_input(e_system);
      manifest.add_input(e_do_a);
      manifest.add_input(e_do_b);
      return cmd_effect(e_system, e_target, e_do_a, e_do_b, e_contrast,
                        e_flags, e_out, manifest);
    }
    if (*chd) {
      if (!c_config.empty()) manifest.add_input(c_config);
      if (!c_alt.empty()) manifest.add_input(c_alt);
      return cmd_chd_demo(c_config, c_alt, c_equilibrium, c_flags, c_out,
                          manifest);
    }
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationFailure& e) {
    std::cerr << e.what();
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
