#include "stochsys/history.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stochsys {

FrozenHistory& FrozenHistory::set(std::string name, double value) {
  values_[std::move(name)] = value;
  return *this;
}

FrozenHistory& FrozenHistory::set_count(std::string name, long count) {
  values_[name] = static_cast<double>(count);
  counts_[std::move(name)] = count;
  return *this;
}

double FrozenHistory::value(std::string_view name, double) const {
  auto it = values_.find(name);
  if (it == values_.end())
    throw std::out_of_range("history has no entry for '" + std::string(name) +
                            "'");
  return it->second;
}

long FrozenHistory::jump_count(std::string_view name, double t) const {
  auto it = counts_.find(name);
  if (it != counts_.end()) return it->second;
  return std::lround(value(name, t));
}

double OverlayHistory::value(std::string_view name, double t) const {
  if (name == name_) return (*fn_)(t);
  return base_->value(name, t);
}

long OverlayHistory::jump_count(std::string_view name, double t) const {
  if (name == name_) return std::lround((*fn_)(t));
  return base_->jump_count(name, t);
}

double ZeroCountHistory::value(std::string_view name, double t) const {
  if (name == name_) return 0.0;
  return base_->value(name, t);
}

long ZeroCountHistory::jump_count(std::string_view name, double t) const {
  if (name == name_) return 0;
  return base_->jump_count(name, t);
}

TrajectoryHistory::TrajectoryHistory(const SystemSpec& spec,
                                     const Trajectory& path)
    : spec_(&spec), path_(&path) {
  for (std::size_t i = 0; i < spec.processes.size(); ++i)
    process_index_[spec.processes[i].name] = i;
}

std::size_t TrajectoryHistory::left_index(double t) const {
  const auto& grid = path_->grid;
  if (grid.empty()) throw std::out_of_range("empty trajectory");
  if (t > grid.back() + 1e-12)
    throw std::out_of_range("history shorter than t");
  // left limit: last grid point strictly before t, the initial state for t=0
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.begin()) return 0;
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

double TrajectoryHistory::value(std::string_view name, double t) const {
  auto it = process_index_.find(name);
  if (it != process_index_.end()) {
    const std::size_t i = it->second;
    const std::size_t g = left_index(t);
    if (spec_->processes[i].is_continuous()) return path_->values[i][g];
    return static_cast<double>(path_->counts[i][g]);
  }
  if (const auto* in = spec_->find_input(name)) return in->curve(t);
  if (const auto* a = spec_->find_attribute(name)) return a->value;
  throw std::out_of_range("history has no entry for '" + std::string(name) +
                          "'");
}

long TrajectoryHistory::jump_count(std::string_view name, double t) const {
  auto it = process_index_.find(name);
  if (it == process_index_.end())
    throw std::out_of_range("'" + std::string(name) + "' is not a process");
  const std::size_t i = it->second;
  if (spec_->processes[i].is_continuous())
    throw std::out_of_range("'" + std::string(name) +
                            "' is not a counting process");
  return path_->counts[i][left_index(t)];
}

}  // namespace stochsys
