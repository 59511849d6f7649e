#include "stochsys/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stochsys {

bool InfluenceGraph::has_node(std::string_view n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

bool InfluenceGraph::has_edge(std::string_view from, std::string_view to) const {
  for (const auto& [j, k] : edges)
    if (j == from && k == to) return true;
  return false;
}

InfluenceGraph build_graph(const SystemSpec& spec) {
  InfluenceGraph g;
  for (const auto& p : spec.processes) g.nodes.push_back(p.name);
  for (const auto& f : spec.inputs) g.nodes.push_back(f.name);
  for (const auto& a : spec.attributes) g.nodes.push_back(a.name);
  for (const auto& p : spec.processes)
    for (const auto& parent : p.parents()) g.edges.emplace_back(parent, p.name);
  return g;
}

bool is_wcli(const SystemSpec& spec, std::string_view k, std::string_view j) {
  if (!spec.has_name(k)) throw std::invalid_argument("unknown name '" + std::string(k) + "'");
  if (!spec.has_name(j)) throw std::invalid_argument("unknown name '" + std::string(j) + "'");
  const ProcessSpec* pk = spec.find_process(k);
  if (!pk) return true;  // inputs and attributes have no dynamics to influence
  for (const auto& parent : pk->parents())
    if (parent == j) return false;
  return true;
}

SystemSpec apply_do(const SystemSpec& spec, const Intervention& iv) {
  if (spec.find_attribute(iv.target))
    throw std::invalid_argument("cannot intervene on attribute '" + iv.target + "'");

  SystemSpec out = spec;
  if (const ProcessSpec* p = spec.find_process(iv.target)) {
    (void)p;
    out.processes.erase(
        std::find_if(out.processes.begin(), out.processes.end(),
                     [&](const ProcessSpec& q) { return q.name == iv.target; }));
    out.inputs.push_back(InputFunction{iv.target, iv.control.curve});
    return out;
  }
  if (InputFunction* f = const_cast<InputFunction*>(out.find_input(iv.target))) {
    // already controlled: swap the control, graph unchanged
    f->curve = iv.control.curve;
    return out;
  }
  throw std::invalid_argument("do target '" + iv.target + "' not found");
}

namespace {

std::set<std::string> ancestors(const SystemSpec& spec, std::string_view of) {
  std::map<std::string, std::vector<std::string>, std::less<>> parents_of;
  for (const auto& p : spec.processes) parents_of[p.name] = p.parents();
  std::set<std::string> seen;
  std::vector<std::string> stack;
  auto push_parents = [&](std::string_view n) {
    auto it = parents_of.find(n);
    if (it == parents_of.end()) return;
    for (const auto& parent : it->second)
      if (seen.insert(parent).second) stack.push_back(parent);
  };
  push_parents(of);
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    push_parents(cur);
  }
  return seen;
}

}  // namespace

std::set<std::string> find_confounders(const SystemSpec& spec,
                                       std::string_view f,
                                       std::string_view d) {
  if (!spec.has_name(f)) throw std::invalid_argument("unknown name '" + std::string(f) + "'");
  if (!spec.has_name(d)) throw std::invalid_argument("unknown name '" + std::string(d) + "'");
  std::set<std::string> af = ancestors(spec, f);
  std::set<std::string> ad = ancestors(spec, d);
  std::set<std::string> out;
  for (const auto& n : af)
    if (ad.count(n)) out.insert(n);
  out.erase(std::string(f));
  out.erase(std::string(d));
  return out;
}

std::string to_dot(const SystemSpec& spec) {
  std::ostringstream os;
  os << "digraph \"" << spec.name << "\" {\n";
  os << "  rankdir=LR;\n";
  for (const auto& p : spec.processes)
    os << "  \"" << p.name << "\" [shape=ellipse];\n";
  for (const auto& f : spec.inputs)
    os << "  \"" << f.name << "\" [shape=diamond];\n";
  for (const auto& a : spec.attributes)
    os << "  \"" << a.name << "\" [shape=box];\n";
  for (const auto& p : spec.processes)
    for (const auto& parent : p.parents())
      os << "  \"" << parent << "\" -> \"" << p.name << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace stochsys
