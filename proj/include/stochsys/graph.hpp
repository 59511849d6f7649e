#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stochsys/types.hpp"

namespace stochsys {

// Directed influence graph: edge (j -> k) means j is a structural parent of
// k's drift/intensity/target, i.e. k is not conditionally locally independent
// of j. Cycles are permitted.
struct InfluenceGraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;

  bool has_node(std::string_view n) const;
  bool has_edge(std::string_view from, std::string_view to) const;
};

// A do-instruction: replace `target` by the external control trajectory.
struct Intervention {
  std::string target;
  InputFunction control;
};

// One node per named entity (processes, inputs, attributes, in declaration
// order); edges exactly the structural parent relations.
InfluenceGraph build_graph(const SystemSpec& spec);

// True iff the evolution of k does not read the history of j, i.e. there is
// no edge j -> k. Works for j == k (self-dependence through a process's own
// term; implicit mean reversion does not count). Throws on unknown names.
bool is_wcli(const SystemSpec& spec, std::string_view k, std::string_view j);

// Breaks every influence *into* the target while keeping all other mechanisms
// untouched: the target process becomes an input carrying the control
// trajectory, all remaining ProcessSpecs are copied verbatim. Re-applying a do
// to an already controlled name just swaps the control, so the operation is
// idempotent on the graph. Attributes cannot be intervened on.
SystemSpec apply_do(const SystemSpec& spec, const Intervention& iv);

// Nodes that are ancestors of both f and d (excluding f and d themselves),
// by graph reachability. The classic confounder pattern returns the common
// cause; a system where f has no ancestors returns the empty set.
std::set<std::string> find_confounders(const SystemSpec& spec,
                                       std::string_view f,
                                       std::string_view d);

// DOT rendering: processes as ellipses, inputs as diamonds, attributes as
// boxes.
std::string to_dot(const SystemSpec& spec);

}  // namespace stochsys
