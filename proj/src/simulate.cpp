#include "stochsys/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

#include "stochsys/rng.hpp"
#include "stochsys/validate.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stochsys {

namespace {

constexpr long kMaxChunks = 256;
constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

enum class Source : std::uint8_t { Process, Input, Attr };

struct SlotRef {
  Source src;
  std::uint32_t idx;
};

struct CTerm {
  double coef;
  SlotRef ref;
};

struct CForm {
  double intercept = 0.0;
  std::vector<CTerm> terms;
};

struct CProc {
  ProcessKind kind;
  double initial = 0.0;
  bool continuous = false;
  // OU / DriftDiffusion
  double theta = 0.0;
  double sigma = 0.0;
  CForm form;  // OU target, diffusion drift, or counting terms (intercept 0)
  // Counting
  IntensityForm iform = IntensityForm::Additive;
  const StepFunction* baseline = nullptr;
  long at_risk = 1;
  // ThresholdEvent
  std::uint32_t monitored = 0;
  double eta = 0.0;
};

struct Compiled {
  const SystemSpec* spec = nullptr;
  std::vector<CProc> procs;
  std::vector<const StepFunction*> inputs;
  std::vector<double> attrs;
  long n_steps = 0;
  double h = 0.0;
  std::vector<long> record_steps;    // ascending, starts at 0, ends at n_steps
  std::vector<double> record_times;
  int stop_index = -1;
};

struct RepDiag {
  long clamped = 0;
  long overflow = 0;
  double max_lambda_h = 0.0;

  void merge(const RepDiag& o) {
    clamped += o.clamped;
    overflow += o.overflow;
    max_lambda_h = std::max(max_lambda_h, o.max_lambda_h);
  }
};

Compiled compile(const SystemSpec& spec, const SimConfig& cfg) {
  ValidationReport rep = validate_system(spec);
  if (!rep.ok())
    throw SimulationError("system '" + spec.name +
                          "' failed validation:\n" + rep.to_string());
  if (!(cfg.step > 0.0)) throw SimulationError("step must be positive");
  if (cfg.replications < 1)
    throw SimulationError("replications must be >= 1");
  if (cfg.record_grid < 1) throw SimulationError("record_grid must be >= 1");

  Compiled c;
  c.spec = &spec;
  c.h = cfg.step;
  c.n_steps = std::llround(spec.horizon / cfg.step);
  if (c.n_steps < 1 ||
      std::abs(static_cast<double>(c.n_steps) * cfg.step - spec.horizon) >
          1e-9 * std::max(1.0, spec.horizon))
    throw SimulationError("step does not divide the horizon");

  const double cost =
      static_cast<double>(cfg.replications) * static_cast<double>(c.n_steps);
  if (cost > cfg.budget) {
    std::ostringstream os;
    os << "replications * steps = " << cost << " exceeds budget "
       << cfg.budget;
    throw BudgetError(os.str());
  }

  std::map<std::string, SlotRef, std::less<>> slot;
  for (std::uint32_t i = 0; i < spec.processes.size(); ++i)
    slot[spec.processes[i].name] = {Source::Process, i};
  for (std::uint32_t i = 0; i < spec.inputs.size(); ++i) {
    slot[spec.inputs[i].name] = {Source::Input, i};
    c.inputs.push_back(&spec.inputs[i].curve);
  }
  for (std::uint32_t i = 0; i < spec.attributes.size(); ++i) {
    slot[spec.attributes[i].name] = {Source::Attr, i};
    c.attrs.push_back(spec.attributes[i].value);
  }

  auto compile_form = [&](const LinearForm& f) {
    CForm out;
    out.intercept = f.intercept;
    for (const auto& t : f.terms)
      out.terms.push_back({t.coefficient, slot.at(t.parent)});
    return out;
  };

  for (const auto& p : spec.processes) {
    CProc q;
    q.kind = p.kind();
    q.initial = p.initial_value;
    q.continuous = p.is_continuous();
    switch (p.kind()) {
      case ProcessKind::OU:
        q.theta = p.ou().theta;
        q.sigma = p.ou().sigma;
        q.form = compile_form(p.ou().target);
        break;
      case ProcessKind::DriftDiffusion:
        q.sigma = p.drift_diffusion().sigma;
        q.form = compile_form(p.drift_diffusion().drift);
        break;
      case ProcessKind::Counting: {
        const auto& cp = p.counting();
        q.iform = cp.intensity_form;
        q.baseline = &cp.baseline;
        q.at_risk = cp.at_risk;
        for (const auto& t : cp.terms)
          q.form.terms.push_back({t.coefficient, slot.at(t.parent)});
        break;
      }
      case ProcessKind::ThresholdEvent:
        q.monitored = slot.at(p.threshold().monitored).idx;
        q.eta = p.threshold().eta;
        break;
    }
    c.procs.push_back(std::move(q));
  }

  if (!cfg.stop_on_event.empty()) {
    const auto it = slot.find(cfg.stop_on_event);
    if (it == slot.end() || it->second.src != Source::Process ||
        spec.processes[it->second.idx].is_continuous())
      throw SimulationError("stop_on_event '" + cfg.stop_on_event +
                            "' is not a counting or threshold process");
    c.stop_index = static_cast<int>(it->second.idx);
  }

  c.record_steps.push_back(0);
  for (long k = cfg.record_grid; k < c.n_steps; k += cfg.record_grid)
    c.record_steps.push_back(k);
  c.record_steps.push_back(c.n_steps);
  for (long k : c.record_steps)
    c.record_times.push_back(static_cast<double>(k) * c.h);
  return c;
}

// One replicate, written into `out`. Every process draws from its own
// counter-based stream, so the path depends only on (seed, replicate).
void run_replicate(const Compiled& c, const SimConfig& cfg, long replicate,
                   Trajectory& out, RepDiag& diag) {
  const std::size_t P = c.procs.size();
  const std::size_t G = c.record_times.size();

  out.grid = c.record_times;
  out.values.assign(P, {});
  out.counts.assign(P, {});
  out.event_times.assign(P, {});
  out.seed = cfg.seed;
  out.replicate = replicate;
  for (std::size_t i = 0; i < P; ++i) {
    if (c.procs[i].continuous)
      out.values[i].assign(G, 0.0);
    else
      out.counts[i].assign(G, 0);
  }

  std::vector<CounterRng> rng;
  rng.reserve(P);
  for (std::size_t i = 0; i < P; ++i)
    rng.emplace_back(cfg.seed, static_cast<std::uint64_t>(replicate),
                     static_cast<std::uint64_t>(i));

  std::vector<double> value(P), next_value(P);
  std::vector<long> count(P), next_count(P);
  for (std::size_t i = 0; i < P; ++i) {
    value[i] = c.procs[i].continuous ? c.procs[i].initial : 0.0;
    count[i] = 0;
  }

  // processes are frozen at the step start; inputs and baselines move with tt
  auto slot_value = [&](SlotRef s, double tt) -> double {
    switch (s.src) {
      case Source::Process:
        return c.procs[s.idx].continuous ? value[s.idx]
                                         : static_cast<double>(count[s.idx]);
      case Source::Input:
        return (*c.inputs[s.idx])(tt);
      default:
        return c.attrs[s.idx];
    }
  };
  auto form_value = [&](const CForm& f, double tt) -> double {
    double acc = f.intercept;
    for (const auto& t : f.terms) acc += t.coef * slot_value(t.ref, tt);
    return acc;
  };
  auto intensity = [&](const CProc& p, double tt) -> double {
    const double base = (*p.baseline)(tt);
    if (p.iform == IntensityForm::Multiplicative) {
      double expo = 0.0;
      for (const auto& t : p.form.terms)
        expo += t.coef * slot_value(t.ref, tt);
      return base * std::exp(expo);
    }
    double lambda = base;
    for (const auto& t : p.form.terms)
      lambda += t.coef * slot_value(t.ref, tt);
    if (lambda < 0.0) {
      ++diag.clamped;
      return 0.0;
    }
    return lambda;
  };

  // threshold events fire on the committed grid states, including t = 0
  auto check_thresholds = [&](double t_now) {
    for (std::size_t i = 0; i < P; ++i) {
      const CProc& p = c.procs[i];
      if (p.kind != ProcessKind::ThresholdEvent || count[i] > 0) continue;
      if (value[p.monitored] > p.eta) {
        count[i] = 1;
        out.event_times[i].push_back(t_now);
      }
    }
  };
  check_thresholds(0.0);

  std::size_t rec = 0;
  auto record = [&](std::size_t r) {
    for (std::size_t i = 0; i < P; ++i) {
      if (c.procs[i].continuous)
        out.values[i][r] = value[i];
      else
        out.counts[i][r] = count[i];
    }
  };
  record(rec++);  // t = 0

  const double sqrt_h = std::sqrt(c.h);
  bool stopped = c.stop_index >= 0 && count[c.stop_index] > 0;

  for (long k = 0; k < c.n_steps && !stopped; ++k) {
    const double t = static_cast<double>(k) * c.h;

    for (std::size_t i = 0; i < P; ++i) {
      const CProc& p = c.procs[i];
      next_value[i] = value[i];
      next_count[i] = count[i];
      switch (p.kind) {
        case ProcessKind::OU: {
          const double mu = form_value(p.form, t);
          double x = value[i] - p.theta * (value[i] - mu) * c.h;
          if (p.sigma != 0.0) x += p.sigma * sqrt_h * rng[i].next_normal();
          next_value[i] = x;
          break;
        }
        case ProcessKind::DriftDiffusion: {
          double x = value[i] + form_value(p.form, t) * c.h;
          if (p.sigma != 0.0) x += p.sigma * sqrt_h * rng[i].next_normal();
          next_value[i] = x;
          break;
        }
        case ProcessKind::Counting: {
          if (count[i] >= p.at_risk) break;
          const double lambda_bar = intensity(p, t);
          if (lambda_bar <= 0.0) break;
          const double lambda_h = lambda_bar * c.h;
          diag.max_lambda_h = std::max(diag.max_lambda_h, lambda_h);
          if (rng[i].next_uniform() >= std::min(1.0, lambda_h)) break;
          // candidate jump: place it in the step, thin against lambda_bar
          const double t_star = t + rng[i].next_uniform() * c.h;
          const double lambda_star = intensity(p, t_star);
          bool accept;
          if (lambda_star >= lambda_bar) {
            if (lambda_star > lambda_bar) ++diag.overflow;
            accept = true;
          } else {
            accept = rng[i].next_uniform() * lambda_bar < lambda_star;
          }
          if (accept) {
            next_count[i] = count[i] + 1;
            out.event_times[i].push_back(t_star);
          }
          break;
        }
        case ProcessKind::ThresholdEvent:
          break;
      }
    }

    value.swap(next_value);
    count.swap(next_count);
    const double t_next = static_cast<double>(k + 1) * c.h;

    for (std::size_t i = 0; i < P; ++i) {
      if (!c.procs[i].continuous) continue;
      if (!std::isfinite(value[i])) {
        std::ostringstream os;
        os << "process '" << c.spec->processes[i].name
           << "' produced a non-finite value at t = " << t_next;
        throw SimulationError(os.str());
      }
    }

    check_thresholds(t_next);

    if (rec < c.record_steps.size() && c.record_steps[rec] == k + 1)
      record(rec++);

    if (c.stop_index >= 0 && count[c.stop_index] > 0) stopped = true;
  }

  // a stopped replicate keeps its last state on the remaining grid points
  while (rec < c.record_steps.size()) record(rec++);
}

struct ChunkPlan {
  long chunk_size;
  long n_chunks;
};

ChunkPlan plan_chunks(long n) {
  const long size = std::max<long>(1, (n + kMaxChunks - 1) / kMaxChunks);
  return {size, (n + size - 1) / size};
}

// Kaplan-Meier / Nelson-Aalen on the record grid from per-replicate first
// event and censor times. Without early stopping every censor time is the
// horizon and the estimates reduce to plain empirical fractions.
SurvivalCurve make_survival_curve(const std::vector<double>& first_event,
                                  const std::vector<double>& censor,
                                  const std::vector<double>& grid) {
  const std::size_t n = first_event.size();
  struct Obs {
    double time;
    bool event;
  };
  std::vector<Obs> obs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (first_event[i] <= censor[i] && first_event[i] < kInf)
      obs[i] = {first_event[i], true};
    else
      obs[i] = {censor[i], false};
  }
  std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.event > b.event;  // events precede censorings at ties
  });

  SurvivalCurve out;
  out.survival.reserve(grid.size());
  out.survival_stderr.reserve(grid.size());
  out.cum_hazard.reserve(grid.size());

  double s = 1.0;
  double na = 0.0;
  double greenwood = 0.0;
  std::size_t pos = 0;
  long at_risk = static_cast<long>(n);
  for (double t : grid) {
    while (pos < obs.size() && obs[pos].time <= t) {
      // group ties
      const double time = obs[pos].time;
      long d = 0, c = 0;
      while (pos < obs.size() && obs[pos].time == time) {
        obs[pos].event ? ++d : ++c;
        ++pos;
      }
      if (d > 0 && at_risk > 0) {
        const double dn = static_cast<double>(d);
        const double rn = static_cast<double>(at_risk);
        s *= 1.0 - dn / rn;
        na += dn / rn;
        if (at_risk > d) greenwood += dn / (rn * (rn - dn));
      }
      at_risk -= d + c;
    }
    out.survival.push_back(s);
    out.survival_stderr.push_back(s * std::sqrt(greenwood));
    out.cum_hazard.push_back(na);
  }
  return out;
}

struct CollectPlan {
  // rows of first_event/censor tables, one per counting-like process
  std::vector<std::size_t> counting_procs;
};

EnsembleSummary assemble_summary(
    const Compiled& c, const SimConfig& cfg,
    const std::vector<double>& sum, const std::vector<double>& sumsq,
    const std::vector<std::vector<double>>& first_event,
    const std::vector<double>& censor, const CollectPlan& plan,
    const RepDiag& diag) {
  const std::size_t P = c.procs.size();
  const std::size_t G = c.record_times.size();
  const double n = static_cast<double>(cfg.replications);

  EnsembleSummary s;
  s.grid = c.record_times;
  s.replications = cfg.replications;
  s.seed = cfg.seed;
  s.step = cfg.step;
  s.diagnostics.clamped_intensities = diag.clamped;
  s.diagnostics.acceptance_overflow = diag.overflow;
  s.diagnostics.max_lambda_h = diag.max_lambda_h;

  s.mean.assign(P, std::vector<double>(G, 0.0));
  s.variance.assign(P, std::vector<double>(G, 0.0));
  for (std::size_t i = 0; i < P; ++i) {
    s.process_names.push_back(c.spec->processes[i].name);
    s.process_kinds.push_back(c.procs[i].kind);
    for (std::size_t g = 0; g < G; ++g) {
      const double sm = sum[i * G + g];
      const double sq = sumsq[i * G + g];
      const double mean = sm / n;
      s.mean[i][g] = mean;
      s.variance[i][g] =
          n > 1.0 ? std::max(0.0, (sq - sm * mean) / (n - 1.0)) : 0.0;
    }
  }

  for (std::size_t row = 0; row < plan.counting_procs.size(); ++row) {
    const std::size_t i = plan.counting_procs[row];
    const std::string& name = c.spec->processes[i].name;
    s.survival[name] =
        make_survival_curve(first_event[row], censor, c.record_times);
    if (c.procs[i].kind == ProcessKind::ThresholdEvent) {
      HittingSamples hs;
      hs.total = cfg.replications;
      for (double t : first_event[row]) {
        if (t < kInf)
          hs.times.push_back(t);
        else
          ++hs.censored;
      }
      std::sort(hs.times.begin(), hs.times.end());
      s.hitting[name] = std::move(hs);
    }
  }
  return s;
}

void collect_replicate(const Compiled& c, const Trajectory& traj, long r,
                       std::vector<double>& sum, std::vector<double>& sumsq,
                       std::vector<std::vector<double>>& first_event,
                       std::vector<double>& censor, const CollectPlan& plan) {
  const std::size_t G = c.record_times.size();
  for (std::size_t i = 0; i < c.procs.size(); ++i) {
    const bool cont = c.procs[i].continuous;
    for (std::size_t g = 0; g < G; ++g) {
      const double v = cont ? traj.values[i][g]
                            : static_cast<double>(traj.counts[i][g]);
      sum[i * G + g] += v;
      sumsq[i * G + g] += v * v;
    }
  }
  double censor_time = c.spec->horizon;
  if (c.stop_index >= 0 && !traj.event_times[c.stop_index].empty())
    censor_time = traj.event_times[c.stop_index].front();
  censor[r] = censor_time;
  for (std::size_t row = 0; row < plan.counting_procs.size(); ++row) {
    const std::size_t i = plan.counting_procs[row];
    first_event[row][r] =
        traj.event_times[i].empty() ? kInf : traj.event_times[i].front();
  }
}

CollectPlan make_collect_plan(const Compiled& c) {
  CollectPlan plan;
  for (std::size_t i = 0; i < c.procs.size(); ++i)
    if (!c.procs[i].continuous) plan.counting_procs.push_back(i);
  return plan;
}

}  // namespace

double HittingSamples::ecdf(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return total > 0
             ? static_cast<double>(it - times.begin()) / static_cast<double>(total)
             : 0.0;
}

double default_budget() {
  if (const char* env = std::getenv("STOCHSYS_BUDGET")) {
    const double v = std::atof(env);
    if (v > 0) return v;
  }
  return SimConfig{}.budget;
}

Trajectory simulate_path(const SystemSpec& spec, const SimConfig& cfg,
                         long replicate_index) {
  const Compiled c = compile(spec, cfg);
  Trajectory out;
  RepDiag diag;
  run_replicate(c, cfg, replicate_index, out, diag);
  return out;
}

EnsembleSummary simulate_ensemble(const SystemSpec& spec,
                                  const SimConfig& cfg) {
  const Compiled c = compile(spec, cfg);
  const CollectPlan plan = make_collect_plan(c);
  const long N = cfg.replications;
  const std::size_t P = c.procs.size();
  const std::size_t G = c.record_times.size();
  const ChunkPlan chunks = plan_chunks(N);

  struct ChunkAccum {
    std::vector<double> sum, sumsq;
    RepDiag diag;
  };
  std::vector<ChunkAccum> partial(chunks.n_chunks);
  std::vector<std::vector<double>> first_event(
      plan.counting_procs.size(), std::vector<double>(N, kInf));
  std::vector<double> censor(N, spec.horizon);

  std::atomic<bool> failed{false};
  std::string error;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(resolve_threads(cfg.threads))
#endif
  for (long ci = 0; ci < chunks.n_chunks; ++ci) {
    if (failed) continue;
    try {
      ChunkAccum acc;
      acc.sum.assign(P * G, 0.0);
      acc.sumsq.assign(P * G, 0.0);
      Trajectory traj;
      const long lo = ci * chunks.chunk_size;
      const long hi = std::min(N, lo + chunks.chunk_size);
      for (long r = lo; r < hi; ++r) {
        run_replicate(c, cfg, r, traj, acc.diag);
        collect_replicate(c, traj, r, acc.sum, acc.sumsq, first_event, censor,
                          plan);
      }
      partial[ci] = std::move(acc);
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        if (!failed) error = e.what();
        failed = true;
      }
    }
  }
  if (failed) throw SimulationError(error);

  // chunk boundaries depend only on N, and chunks are merged in index order,
  // so the reduction is identical for any worker count
  std::vector<double> sum(P * G, 0.0), sumsq(P * G, 0.0);
  RepDiag diag;
  for (const auto& acc : partial) {
    for (std::size_t j = 0; j < P * G; ++j) {
      sum[j] += acc.sum[j];
      sumsq[j] += acc.sumsq[j];
    }
    diag.merge(acc.diag);
  }

  return assemble_summary(c, cfg, sum, sumsq, first_event, censor, plan, diag);
}

EnsembleSummary simulate_ensemble_serial(const SystemSpec& spec,
                                         const SimConfig& cfg) {
  const Compiled c = compile(spec, cfg);
  const CollectPlan plan = make_collect_plan(c);
  const long N = cfg.replications;
  const std::size_t P = c.procs.size();
  const std::size_t G = c.record_times.size();

  std::vector<double> sum(P * G, 0.0), sumsq(P * G, 0.0);
  std::vector<std::vector<double>> first_event(
      plan.counting_procs.size(), std::vector<double>(N, kInf));
  std::vector<double> censor(N, spec.horizon);
  RepDiag diag;
  Trajectory traj;
  for (long r = 0; r < N; ++r) {
    run_replicate(c, cfg, r, traj, diag);
    collect_replicate(c, traj, r, sum, sumsq, first_event, censor, plan);
  }
  return assemble_summary(c, cfg, sum, sumsq, first_event, censor, plan, diag);
}

HittingSamples estimate_hitting_distribution(const SystemSpec& spec,
                                             const SimConfig& cfg,
                                             std::string_view event) {
  const ProcessSpec* p = spec.find_process(event);
  if (!p || p->kind() != ProcessKind::ThresholdEvent)
    throw std::invalid_argument("'" + std::string(event) +
                                "' is not a threshold event process");
  EnsembleSummary s = simulate_ensemble(spec, cfg);
  return s.hitting.at(std::string(event));
}

void for_each_trajectory(const SystemSpec& spec, const SimConfig& cfg,
                         const std::function<void(const Trajectory&)>& sink) {
  const Compiled c = compile(spec, cfg);
  const long N = cfg.replications;
  const ChunkPlan chunks = plan_chunks(N);
  const int threads = resolve_threads(cfg.threads);
  const long wave = std::max(1, threads) * 2;

  std::atomic<bool> failed{false};
  std::string error;
  std::vector<std::vector<Trajectory>> buffer(wave);

  for (long wave_start = 0; wave_start < chunks.n_chunks;
       wave_start += wave) {
    const long wave_end = std::min(chunks.n_chunks, wave_start + wave);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long ci = wave_start; ci < wave_end; ++ci) {
      if (failed) continue;
      try {
        auto& slot = buffer[ci - wave_start];
        const long lo = ci * chunks.chunk_size;
        const long hi = std::min(N, lo + chunks.chunk_size);
        slot.resize(hi - lo);
        RepDiag diag;
        for (long r = lo; r < hi; ++r)
          run_replicate(c, cfg, r, slot[r - lo], diag);
      } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
        {
          if (!failed) error = e.what();
          failed = true;
        }
      }
    }
    if (failed) throw SimulationError(error);
    for (long ci = wave_start; ci < wave_end; ++ci)
      for (const Trajectory& t : buffer[ci - wave_start]) sink(t);
  }
}

long count_at(const Trajectory& path, std::size_t process_index, double t) {
  const auto& grid = path.grid;
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t g =
      it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  return path.counts[process_index][g];
}

}  // namespace stochsys
