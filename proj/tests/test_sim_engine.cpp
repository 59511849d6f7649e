#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stochsys/eval.hpp"
#include "stochsys/simulate.hpp"
#include "stochsys/validate.hpp"

using namespace stochsys;

namespace {

SystemSpec single_counting(double rate, double horizon, long at_risk) {
  SystemSpec s;
  s.name = "poisson";
  s.horizon = horizon;
  s.processes.push_back(ProcessSpec::make_counting(
      "N", IntensityForm::Additive, StepFunction::constant(rate), {}, at_risk));
  return s;
}

SystemSpec single_ou(double theta, double mu, double sigma, double x0,
                     double horizon) {
  SystemSpec s;
  s.name = "ou";
  s.horizon = horizon;
  s.processes.push_back(
      ProcessSpec::make_ou("X", theta, sigma, LinearForm{mu, {}}, x0));
  return s;
}

SystemSpec degradation(double drift, double sigma, double eta, double horizon,
                       double initial = 0.0) {
  SystemSpec s;
  s.name = "degradation";
  s.horizon = horizon;
  s.processes.push_back(ProcessSpec::make_drift_diffusion(
      "A", LinearForm{drift, {}}, sigma, initial));
  s.processes.push_back(ProcessSpec::make_threshold_event("E", "A", eta));
  return s;
}

// mixed system exercising every process kind
SystemSpec mixed_system() {
  SystemSpec s;
  s.name = "mixed";
  s.horizon = 5.0;
  s.processes.push_back(
      ProcessSpec::make_ou("X", 1.0, 0.5, LinearForm{1.0, {}}, 0.0));
  s.processes.push_back(ProcessSpec::make_drift_diffusion(
      "A", LinearForm{0.2, {{"X", 0.3}}}, 0.5, 0.0));
  s.processes.push_back(ProcessSpec::make_counting(
      "D", IntensityForm::Additive, StepFunction::constant(0.05),
      {{"X", 0.1}}, 3));
  s.processes.push_back(ProcessSpec::make_threshold_event("E", "A", 1.5));
  return s;
}

bool summaries_equal_bits(const EnsembleSummary& a, const EnsembleSummary& b) {
  if (a.grid != b.grid) return false;
  if (a.mean != b.mean || a.variance != b.variance) return false;
  for (const auto& [name, sc] : a.survival) {
    const auto& other = b.survival.at(name);
    if (sc.survival != other.survival || sc.cum_hazard != other.cum_hazard ||
        sc.survival_stderr != other.survival_stderr)
      return false;
  }
  for (const auto& [name, hs] : a.hitting) {
    const auto& other = b.hitting.at(name);
    if (hs.times != other.times || hs.censored != other.censored) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("constant-intensity counting process has Poisson mean jumps") {
  SystemSpec s = single_counting(1.0, 10.0, 1000000);
  SimConfig cfg;
  cfg.step = 0.005;
  cfg.replications = 2000;
  cfg.seed = 7;
  cfg.record_grid = 200;
  const auto sum = simulate_ensemble(s, cfg);
  const double mean_T = sum.mean[0].back();
  CHECK(mean_T == doctest::Approx(10.0).epsilon(0.03));
  // per-step Bernoulli thinning: variance lambda*T*(1 - lambda*h)
  CHECK(sum.variance[0].back() == doctest::Approx(10.0 * 0.995).epsilon(0.10));
}

TEST_CASE("OU with sigma=0 follows exp(-theta t) within O(h)") {
  SystemSpec s = single_ou(1.0, 0.0, 0.0, 1.0, 5.0);
  SimConfig cfg;
  cfg.replications = 1;
  cfg.seed = 1;

  cfg.step = 0.01;
  const Trajectory coarse = simulate_path(s, cfg, 0);
  double err_coarse = 0.0;
  for (std::size_t g = 0; g < coarse.grid.size(); ++g)
    err_coarse = std::max(err_coarse, std::abs(coarse.values[0][g] -
                                               std::exp(-coarse.grid[g])));
  CHECK(err_coarse < 0.02);

  cfg.step = 0.005;
  const Trajectory fine = simulate_path(s, cfg, 0);
  double err_fine = 0.0;
  for (std::size_t g = 0; g < fine.grid.size(); ++g)
    err_fine = std::max(err_fine,
                        std::abs(fine.values[0][g] - std::exp(-fine.grid[g])));
  // halving h halves the deterministic-flow error
  CHECK(err_coarse / err_fine == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("no noise, no intensities: identical deterministic replicates") {
  SystemSpec s;
  s.name = "flow";
  s.horizon = 2.0;
  s.processes.push_back(
      ProcessSpec::make_ou("X", 0.5, 0.0, LinearForm{1.0, {}}, 0.0));
  s.processes.push_back(ProcessSpec::make_drift_diffusion(
      "A", LinearForm{0.1, {{"X", 1.0}}}, 0.0, 0.0));
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 5;
  const Trajectory t0 = simulate_path(s, cfg, 0);
  for (long r = 1; r < 5; ++r) {
    const Trajectory tr = simulate_path(s, cfg, r);
    CHECK(tr.values == t0.values);
  }
  const auto sum = simulate_ensemble(s, cfg);
  for (std::size_t g = 0; g < sum.grid.size(); ++g)
    CHECK(sum.variance[0][g] < 1e-14);  // cancellation residue only
}

TEST_CASE("OU ensemble matches stationary moments") {
  SystemSpec s = single_ou(0.5, 2.0, 1.0, 0.0, 20.0);
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 4000;
  cfg.seed = 11;
  cfg.record_grid = 400;
  const auto sum = simulate_ensemble(s, cfg);
  const double want_mean = oracle::ou_mean(0.0, 2.0, 0.5, 20.0);
  const double want_var = oracle::ou_variance(1.0, 0.5, 20.0);
  CHECK(std::abs(sum.mean[0].back() - want_mean) < 0.02 * want_mean);
  CHECK(std::abs(sum.variance[0].back() - want_var) < 0.05 * want_var);
}

TEST_CASE("0-1 counting survival lies in the DKW band of the exponential") {
  SystemSpec s = single_counting(0.1, 20.0, 1);
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 4000;
  cfg.seed = 3;
  cfg.record_grid = 100;
  const auto sum = simulate_ensemble(s, cfg);
  const auto& sc = sum.survival.at("N");
  const double band = oracle::dkw_epsilon(4000, 1e-6) + 0.002;  // + O(h) bias
  for (std::size_t g = 0; g < sum.grid.size(); ++g) {
    CHECK(std::abs(sc.survival[g] - std::exp(-0.1 * sum.grid[g])) < band);
    if (g) CHECK(sc.survival[g] <= sc.survival[g - 1]);  // nonincreasing
    CHECK(sc.survival[g] >= 0.0);
    CHECK(sc.survival[g] <= 1.0);
  }
  // Nelson-Aalen tracks the true cumulative hazard
  CHECK(sc.cum_hazard.back() == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("deterministic degradation hits the barrier at eta/drift") {
  SystemSpec s = degradation(0.5, 0.0, 1.0, 4.0);
  SimConfig cfg;
  cfg.step = 1e-3;
  cfg.replications = 3;
  const auto hits = estimate_hitting_distribution(s, cfg, "E");
  CHECK(hits.censored == 0);
  REQUIRE(hits.times.size() == 3);
  for (double t : hits.times) CHECK(std::abs(t - 2.0) < 3e-3);
}

TEST_CASE("barrier below the initial value fires at t = 0") {
  SystemSpec s = degradation(0.5, 1.0, 1.0, 2.0, /*initial=*/2.0);
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 10;
  cfg.seed = 5;
  const auto hits = estimate_hitting_distribution(s, cfg, "E");
  REQUIRE(hits.times.size() == 10);
  for (double t : hits.times) CHECK(t == 0.0);
}

TEST_CASE("hitting-time law approaches the inverse Gaussian") {
  SystemSpec s = degradation(0.5, 1.0, 1.0, 10.0);
  SimConfig cfg;
  cfg.step = 0.005;
  cfg.replications = 3000;
  cfg.seed = 17;
  cfg.record_grid = 100;
  const auto hits = estimate_hitting_distribution(s, cfg, "E");
  const double ks = oracle::ks_distance(
      hits.times, static_cast<std::size_t>(hits.total),
      [](double t) { return oracle::ig_cdf(1.0, 0.5, t); });
  CHECK(ks < 0.05);  // the acceptance suite runs the tight version
}

TEST_CASE("estimate_hitting_distribution rejects non-threshold processes") {
  SystemSpec s = degradation(0.5, 1.0, 1.0, 2.0);
  SimConfig cfg;
  CHECK_THROWS_AS(estimate_hitting_distribution(s, cfg, "A"),
                  std::invalid_argument);
}

TEST_CASE("ensembles are bit-identical across worker counts and runs") {
  SystemSpec s = mixed_system();
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 600;
  cfg.seed = 99;
  cfg.record_grid = 10;

  SimConfig serial = cfg;
  serial.threads = 1;
  SimConfig wide = cfg;
  wide.threads = 8;

  const auto a = simulate_ensemble(s, serial);
  const auto b = simulate_ensemble(s, wide);
  const auto c = simulate_ensemble(s, wide);  // same run repeated
  CHECK(summaries_equal_bits(a, b));
  CHECK(summaries_equal_bits(b, c));
}

TEST_CASE("parallel kernel agrees with the serial reference") {
  SystemSpec s = mixed_system();
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 500;
  cfg.seed = 4242;
  cfg.record_grid = 25;
  const auto ref = simulate_ensemble_serial(s, cfg);
  const auto par = simulate_ensemble(s, cfg);

  // integer-derived statistics are exactly equal
  for (const auto& [name, sc] : ref.survival) {
    CHECK(par.survival.at(name).survival == sc.survival);
    CHECK(par.survival.at(name).cum_hazard == sc.cum_hazard);
  }
  for (const auto& [name, hs] : ref.hitting)
    CHECK(par.hitting.at(name).times == hs.times);

  // moments may differ by accumulation order only
  for (std::size_t i = 0; i < ref.mean.size(); ++i)
    for (std::size_t g = 0; g < ref.mean[i].size(); ++g) {
      CHECK(par.mean[i][g] == doctest::Approx(ref.mean[i][g]).epsilon(1e-12));
      CHECK(par.variance[i][g] ==
            doctest::Approx(ref.variance[i][g]).epsilon(1e-12));
    }
}

TEST_CASE("single-replicate ensemble equals that path's statistics") {
  SystemSpec s = mixed_system();
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 1;
  cfg.seed = 12;
  const auto sum = simulate_ensemble(s, cfg);
  const Trajectory path = simulate_path(s, cfg, 0);
  for (std::size_t g = 0; g < sum.grid.size(); ++g) {
    CHECK(sum.mean[0][g] == path.values[0][g]);
    CHECK(sum.variance[0][g] == 0.0);
    CHECK(sum.mean[2][g] == static_cast<double>(path.counts[2][g]));
  }
}

TEST_CASE("counting paths are nondecreasing and capped at at_risk") {
  SystemSpec s = mixed_system();
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 50;
  cfg.seed = 31;
  for (long r = 0; r < cfg.replications; ++r) {
    const Trajectory path = simulate_path(s, cfg, r);
    long prev = 0;
    for (long c : path.counts[2]) {
      CHECK(c >= prev);
      CHECK(c <= 3);
      prev = c;
    }
    CHECK(static_cast<long>(path.event_times[2].size()) == path.counts[2].back());
  }
}

TEST_CASE("record thinning keeps endpoints and spacing") {
  SystemSpec s = single_ou(1.0, 0.0, 0.0, 1.0, 1.0);
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 1;
  cfg.record_grid = 10;
  const Trajectory path = simulate_path(s, cfg, 0);
  REQUIRE(path.grid.size() == 11);
  CHECK(path.grid.front() == 0.0);
  CHECK(path.grid.back() == doctest::Approx(1.0));
  CHECK(path.grid[1] == doctest::Approx(0.1));
}

TEST_CASE("stop_on_event freezes the replicate at the event") {
  SystemSpec s = degradation(1.0, 0.0, 0.5, 2.0);
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 1;
  cfg.stop_on_event = "E";
  const Trajectory path = simulate_path(s, cfg, 0);
  // the barrier is crossed just after t = 0.5; afterwards the state is frozen
  CHECK(path.values[0].back() == doctest::Approx(0.51).epsilon(0.05));
  CHECK(path.counts[1].back() == 1);
  CHECK(path.grid.back() == doctest::Approx(2.0));
}

TEST_CASE("budget overruns raise BudgetError") {
  SystemSpec s = single_ou(1.0, 0.0, 1.0, 0.0, 10.0);
  SimConfig cfg;
  cfg.step = 1e-4;
  cfg.replications = 1000000;
  cfg.budget = 1e6;
  CHECK_THROWS_AS(simulate_ensemble(s, cfg), BudgetError);
}

TEST_CASE("non-finite blow-up is reported with the process name") {
  SystemSpec s = single_ou(1e6, 0.0, 0.0, 1.0, 10.0);  // theta*h >> 2 diverges
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 2;
  CHECK_THROWS_WITH_AS(simulate_ensemble(s, cfg), doctest::Contains("'X'"),
                       SimulationError);
}

TEST_CASE("a step that does not divide the horizon is rejected") {
  SystemSpec s = single_ou(1.0, 0.0, 1.0, 0.0, 1.0);
  SimConfig cfg;
  cfg.step = 0.3;
  CHECK_THROWS_AS(simulate_path(s, cfg, 0), SimulationError);
}

TEST_CASE("engine stepping matches the public pointwise evaluators") {
  // deterministic two-process system advanced by hand with eval_drift
  SystemSpec s;
  s.name = "parity";
  s.horizon = 0.1;
  s.processes.push_back(
      ProcessSpec::make_ou("X", 0.7, 0.0, LinearForm{1.3, {}}, 0.4));
  s.processes.push_back(ProcessSpec::make_drift_diffusion(
      "A", LinearForm{0.1, {{"X", 0.6}}}, 0.0, 0.0));
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 1;
  const Trajectory path = simulate_path(s, cfg, 0);

  double x = 0.4, a = 0.0;
  for (std::size_t k = 0; k < 10; ++k) {
    const double t = 0.01 * static_cast<double>(k);
    FrozenHistory h;
    h.set("X", x).set("A", a);
    const double dx = eval_drift(s.processes[0], t, h);
    const double da = eval_drift(s.processes[1], t, h);
    x += dx * 0.01;
    a += da * 0.01;
    CHECK(path.values[0][k + 1] == x);  // exact: same arithmetic
    CHECK(path.values[1][k + 1] == a);
  }
}

TEST_CASE("for_each_trajectory delivers replicates in order") {
  SystemSpec s = mixed_system();
  SimConfig cfg;
  cfg.step = 0.01;
  cfg.replications = 137;
  cfg.seed = 8;
  cfg.record_grid = 100;
  long expected = 0;
  for_each_trajectory(s, cfg, [&](const Trajectory& t) {
    CHECK(t.replicate == expected);
    ++expected;
  });
  CHECK(expected == 137);
}
