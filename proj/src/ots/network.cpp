#include "network.hpp"

#include <cmath>
#include <numeric>

namespace ots {

void Network::finalize() {
  bus_index_.clear();
  bus_index_.reserve(buses.size());
  for (int i = 0; i < num_buses(); ++i) {
    auto [it, inserted] = bus_index_.emplace(buses[i].id, i);
    if (!inserted)
      throw ValidationError("duplicate bus id " + std::to_string(buses[i].id));
  }

  reference_bus_ = -1;
  for (int i = 0; i < num_buses(); ++i) {
    if (buses[i].kind == BusKind::Reference && reference_bus_ < 0) reference_bus_ = i;
  }

  gens_at_bus_.assign(buses.size(), {});
  for (int g = 0; g < num_generators(); ++g) {
    generators[g].id = g;
    int b = bus_index(generators[g].bus);
    if (b < 0)
      throw ValidationError("generator " + std::to_string(g) + " references missing bus " +
                            std::to_string(generators[g].bus));
    gens_at_bus_[b].push_back(g);
  }

  lines_from_bus_.assign(buses.size(), {});
  lines_to_bus_.assign(buses.size(), {});
  for (int l = 0; l < num_lines(); ++l) {
    lines[l].id = l;
    int o = bus_index(lines[l].from_bus);
    int d = bus_index(lines[l].to_bus);
    if (o < 0 || d < 0)
      throw ValidationError("line " + std::to_string(l) + " references a missing bus");
    if (o == d)
      throw ValidationError("line " + std::to_string(l) + " connects bus " +
                            std::to_string(lines[l].from_bus) + " to itself");
    lines_from_bus_[o].push_back(l);
    lines_to_bus_[d].push_back(l);
  }
}

int Network::bus_index(int bus_label) const {
  auto it = bus_index_.find(bus_label);
  return it == bus_index_.end() ? -1 : it->second;
}

std::vector<int> Network::switchable_line_ids() const {
  std::vector<int> ids;
  for (const auto& l : lines)
    if (l.switchable) ids.push_back(l.id);
  return ids;
}

namespace {

// Union-find over bus indexes, used for the connectivity warning.
struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<Diagnostic> validate(const Network& net) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) {
    out.push_back({Diagnostic::Severity::Error, std::move(msg)});
  };
  auto warn = [&](std::string msg) {
    out.push_back({Diagnostic::Severity::Warning, std::move(msg)});
  };

  if (net.buses.empty()) {
    error("network has no buses");
    return out;
  }
  if (!(net.base_mva > 0.0) || !std::isfinite(net.base_mva))
    error("base power must be positive and finite");
  if (net.generators.empty()) error("network has no generators");

  int refs = 0;
  for (const auto& b : net.buses) {
    if (b.kind == BusKind::Reference) ++refs;
    if (!std::isfinite(b.demand_pu))
      error("bus " + std::to_string(b.id) + " has a non-finite demand");
    else if (b.demand_pu < 0.0)
      warn("bus " + std::to_string(b.id) + " has negative demand");
    if (b.kind == BusKind::Isolated && b.demand_pu > 0.0)
      warn("isolated bus " + std::to_string(b.id) + " carries demand");
  }
  if (refs == 0) error("network has no reference bus");
  if (refs > 1) error("network has " + std::to_string(refs) + " reference buses");

  for (const auto& g : net.generators) {
    if (!std::isfinite(g.p_min_pu) || !std::isfinite(g.p_max_pu) || !std::isfinite(g.cost_per_pu)) {
      error("generator " + std::to_string(g.id) + " has non-finite data");
      continue;
    }
    if (g.p_min_pu < 0.0)
      error("generator " + std::to_string(g.id) + " has negative minimum output");
    if (g.p_min_pu > g.p_max_pu)
      error("generator " + std::to_string(g.id) + " has minimum output above maximum");
    if (g.cost_per_pu < 0.0)
      error("generator " + std::to_string(g.id) + " has negative cost");
  }

  for (const auto& l : net.lines) {
    if (!std::isfinite(l.susceptance_pu) || l.susceptance_pu <= 0.0)
      error("line " + std::to_string(l.id) + " needs a positive finite susceptance");
    if (!std::isfinite(l.flow_limit_pu) || l.flow_limit_pu <= 0.0)
      error("line " + std::to_string(l.id) + " needs a positive finite flow limit");
  }

  double total_capacity = 0.0, total_demand = 0.0;
  for (const auto& g : net.generators) total_capacity += g.p_max_pu;
  for (const auto& b : net.buses) total_demand += b.demand_pu;
  if (total_capacity < total_demand)
    warn("total generation capacity is below total demand; load shedding is unavoidable");

  // Connectivity over every line, ignoring buses flagged isolated.
  DisjointSets sets(net.num_buses());
  for (const auto& l : net.lines)
    sets.unite(net.bus_index(l.from_bus), net.bus_index(l.to_bus));
  int root = -1;
  bool connected = true;
  for (int i = 0; i < net.num_buses(); ++i) {
    if (net.buses[i].kind == BusKind::Isolated) continue;
    if (root < 0)
      root = sets.find(i);
    else if (sets.find(i) != root)
      connected = false;
  }
  if (!connected) warn("network is not connected even with every line closed");

  return out;
}

}  // namespace ots
