#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stochsys/history.hpp"
#include "stochsys/types.hpp"

namespace stochsys {

struct SimConfig {
  double step = 0.01;          // h; must divide the horizon
  long replications = 1000;    // N
  std::uint64_t seed = 0;
  long record_grid = 1;        // record every k-th step (t=0 and T always kept)
  double budget = 2e9;         // max replications * steps
  int threads = 0;             // 0 = all available workers
  std::string stop_on_event;   // optional counting/threshold process; the
                               // replicate freezes at its first jump
};

struct Diagnostics {
  long clamped_intensities = 0;   // additive intensities cut at zero
  long acceptance_overflow = 0;   // thinning ratio exceeded 1 within a step
  double max_lambda_h = 0.0;      // should stay < 0.5 for the scheme to hold
};

// Kaplan-Meier survival with Greenwood standard errors plus the Nelson-Aalen
// cumulative hazard, evaluated on the record grid. Without early stopping
// there is no censoring before the horizon and the survival estimate reduces
// to the plain empirical fraction with binomial errors.
struct SurvivalCurve {
  std::vector<double> survival;
  std::vector<double> survival_stderr;
  std::vector<double> cum_hazard;
};

struct HittingSamples {
  std::vector<double> times;  // sorted first-passage times, uncensored only
  long censored = 0;          // replicates that never fired before the horizon
  long total = 0;

  double ecdf(double t) const;
};

struct EnsembleSummary {
  std::vector<double> grid;
  std::vector<std::string> process_names;
  std::vector<ProcessKind> process_kinds;
  // Per process, per grid point. Counting-like processes report the moments
  // of their jump count.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> variance;
  std::map<std::string, SurvivalCurve> survival;   // counting + threshold
  std::map<std::string, HittingSamples> hitting;   // threshold events
  Diagnostics diagnostics;
  long replications = 0;
  std::uint64_t seed = 0;
  double step = 0.0;
};

// One replicate path, deterministic given (spec, cfg.seed, replicate_index).
// Continuous processes advance by Euler-Maruyama; counting processes jump via
// per-step thinning against the step-start intensity; threshold events fire
// at the first grid time where the monitored value exceeds eta. All processes
// update simultaneously from the step-start state.
Trajectory simulate_path(const SystemSpec& spec, const SimConfig& cfg,
                         long replicate_index);

// Aggregates cfg.replications independent paths. OpenMP-parallel over fixed
// replicate chunks combined in chunk order, so the result is bit-identical
// for any worker count.
EnsembleSummary simulate_ensemble(const SystemSpec& spec, const SimConfig& cfg);

// Plain single-threaded loop kept as the reference implementation for tests
// and benchmarks. Statistically identical to simulate_ensemble (same paths);
// floating-point accumulation order differs, so moments may differ by a few
// ulps.
EnsembleSummary simulate_ensemble_serial(const SystemSpec& spec,
                                         const SimConfig& cfg);

// First-passage law of a threshold event: sorted hitting times with the
// censored-at-horizon count.
HittingSamples estimate_hitting_distribution(const SystemSpec& spec,
                                             const SimConfig& cfg,
                                             std::string_view event);

// Streams every replicate path through `sink` in replicate order. Paths are
// computed in parallel waves but delivered sequentially, so sinks may write
// files without locking.
void for_each_trajectory(const SystemSpec& spec, const SimConfig& cfg,
                         const std::function<void(const Trajectory&)>& sink);

// Count of a counting-like process at time t (last grid point <= t).
long count_at(const Trajectory& path, std::size_t process_index, double t);

// Replication budget taken from the environment (STOCHSYS_BUDGET) when set,
// otherwise the built-in default.
double default_budget();

}  // namespace stochsys
