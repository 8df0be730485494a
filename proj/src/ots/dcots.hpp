#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mip.hpp"
#include "network.hpp"

namespace ots {

// One optimization scenario on a network: per-bus demands and per-generator
// costs, an optional limit on how many lines may be opened, and the penalty
// price on unserved or excess power.
struct DcotsInstance {
  std::shared_ptr<const Network> network;
  std::vector<double> demand_pu;  // by bus index
  std::vector<double> gen_cost;   // by generator id
  std::optional<int> cardinality_k;
  double infeasibility_cost = 1e6;
};

// Instance with demands and costs copied straight from the network.
DcotsInstance nominal_instance(std::shared_ptr<const Network> net,
                               std::optional<int> cardinality_k = std::nullopt,
                               double infeasibility_cost = 1e6);

// Throws ValidationError / InvalidArgument when the instance cannot be
// solved; returns warnings (penalty price not above every generator cost,
// ...) otherwise.
std::vector<Diagnostic> check_instance(const DcotsInstance& inst);

// Set of open lines, kept sorted and duplicate-free.
struct Topology {
  std::vector<int> open_lines;

  static Topology from_lines(std::vector<int> lines);
  bool is_open(int line_id) const;
  int open_count() const { return static_cast<int>(open_lines.size()); }
  bool operator==(const Topology&) const = default;
};

// Throws InvalidArgument if the topology names unknown or non-switchable
// lines or exceeds the instance's cardinality limit.
void check_topology(const DcotsInstance& inst, const Topology& topo);

struct DispatchSolution {
  std::vector<double> dispatch_pu;   // by generator id
  std::vector<double> flow_pu;       // by line id, zero on open lines
  std::vector<double> angle_rad;     // by bus index
  std::vector<double> load_shed_pu;  // by bus index
  std::vector<double> over_gen_pu;   // by bus index
  double generation_cost = 0.0;
  double penalty_cost = 0.0;
  double total_objective = 0.0;
  bool feasible = false;  // true when no shedding or spill is needed
  double solve_seconds = 0.0;
};

// Full switching model over the instance: one binary per line, big-M
// de-activation of the flow physics on open lines, and slack power at every
// bus priced at the infeasibility cost.
MipProblem build_dcots_mip(const DcotsInstance& inst);

// Optimal dispatch with the given lines opened and everything else fixed
// closed (a single LP).
DispatchSolution evaluate_topology(const DcotsInstance& inst, const Topology& topo);

struct DcotsResult {
  Topology topology;
  DispatchSolution dispatch;
  MipResult mip;
};

// Branch-and-bound solve of the switching problem. The warm topology (all
// lines closed when absent) seeds the incumbent, so a solution always
// exists, even on a time limit of zero.
DcotsResult solve_dcots(const DcotsInstance& inst, double rel_gap = 0.0,
                        double time_limit_seconds = 0.0,
                        const std::optional<Topology>& warm = std::nullopt);

// Visits every topology within the cardinality limit: fewest open lines
// first, lexicographic within a cardinality. Throws InvalidArgument when
// more than max_topologies candidates exist.
void for_each_topology(const DcotsInstance& inst, long max_topologies,
                       const std::function<void(const Topology&)>& visit);

// Exhaustive enumeration of every topology within the cardinality limit.
// Ties break toward fewer open lines, then lexicographically smaller line
// sets. Throws InvalidArgument when more than max_topologies candidates
// would have to be evaluated.
DcotsResult brute_force_dcots(const DcotsInstance& inst, long max_topologies = 1000000);

// (z - z_best) / z_best. Throws InvalidArgument when z_best is not positive.
double relative_gap(double z, double z_best);

struct CongestionStats {
  double binding_fraction = 0.0;  // share of closed lines at their flow limit
  double all_closed_objective = 0.0;
  double best_objective = 0.0;
  double switching_gain = 0.0;  // relative_gap(all_closed, best)
};

// How congested the all-closed dispatch is and how much switching helps.
// best_known skips the internal solve when the caller already has one.
CongestionStats congestion_stats(const DcotsInstance& inst,
                                 std::optional<double> best_known = std::nullopt,
                                 double rel_gap = 0.01, double time_limit_seconds = 600.0);

// JSON document for a solved topology; field values are in megawatts where
// the name says so. suppress_timing zeroes the wall-clock field so repeated
// runs emit identical bytes.
std::string dispatch_to_json(const DispatchSolution& dispatch, const Topology& topo,
                             double base_mva, bool suppress_timing = false);

}  // namespace ots
