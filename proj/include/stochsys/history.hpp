#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stochsys/types.hpp"

namespace stochsys {

// One realization of a system on a grid. The arrays are parallel to
// SystemSpec::processes: continuous processes fill `values` (one entry per
// grid point), counting-like processes fill `counts` plus the exact event
// times. Counting paths are nondecreasing integer step functions.
struct Trajectory {
  std::vector<double> grid;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<long>> counts;
  std::vector<std::vector<double>> event_times;
  std::uint64_t seed = 0;
  long replicate = 0;
};

// Read access to the realized past of a system. `value` returns the
// left-limit state of a process at t (the current count for counting
// processes), the control level for inputs and the constant for attributes.
// `jump_count` is meaningful for counting-like processes only.
class HistoryView {
 public:
  virtual ~HistoryView() = default;
  virtual double value(std::string_view name, double t) const = 0;
  virtual long jump_count(std::string_view name, double t) const = 0;
};

// Flat snapshot: every name maps to a fixed value and (optionally) a jump
// count. Convenient for pointwise evaluation, unit tests and probe batteries.
class FrozenHistory : public HistoryView {
 public:
  FrozenHistory& set(std::string name, double value);
  FrozenHistory& set_count(std::string name, long count);

  double value(std::string_view name, double t) const override;
  // Falls back to rounding the plain value when no count was set.
  long jump_count(std::string_view name, double t) const override;

 private:
  std::map<std::string, double, std::less<>> values_;
  std::map<std::string, long, std::less<>> counts_;
};

// Delegates to a base view but overrides one name with a deterministic
// trajectory. This is how contrast trajectories f / f' are plugged into an
// otherwise shared history.
class OverlayHistory : public HistoryView {
 public:
  OverlayHistory(const HistoryView& base, std::string name,
                 const StepFunction& fn)
      : base_(&base), name_(std::move(name)), fn_(&fn) {}

  double value(std::string_view name, double t) const override;
  long jump_count(std::string_view name, double t) const override;

 private:
  const HistoryView* base_;
  std::string name_;
  const StepFunction* fn_;
};

// Forces the jump count of one process to zero, leaving everything else to
// the base view. Used for 0-1 effect targets where the pre-event history is
// the only one of interest.
class ZeroCountHistory : public HistoryView {
 public:
  ZeroCountHistory(const HistoryView& base, std::string name)
      : base_(&base), name_(std::move(name)) {}

  double value(std::string_view name, double t) const override;
  long jump_count(std::string_view name, double t) const override;

 private:
  const HistoryView* base_;
  std::string name_;
};

// View over a simulated trajectory prefix: process values are read from the
// recorded path (left limit at t), inputs from their control functions,
// attributes from their constants. Throws std::out_of_range when asked about
// a time beyond the recorded prefix.
class TrajectoryHistory : public HistoryView {
 public:
  TrajectoryHistory(const SystemSpec& spec, const Trajectory& path);

  double value(std::string_view name, double t) const override;
  long jump_count(std::string_view name, double t) const override;

 private:
  std::size_t left_index(double t) const;

  const SystemSpec* spec_;
  const Trajectory* path_;
  std::map<std::string, std::size_t, std::less<>> process_index_;
};

}  // namespace stochsys
