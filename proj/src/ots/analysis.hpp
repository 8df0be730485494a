#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heuristics.hpp"

namespace ots {

// How often each line is opened across the distinct topologies of a
// training set. Frequencies are over distinct topologies, not entries.
struct TopologyCensus {
  int usable_entries = 0;
  std::vector<Topology> unique_topologies;  // lexicographically sorted
  std::vector<int> multiplicity;            // entries per unique topology
  std::map<int, int> line_open_count;       // over unique topologies
  std::map<std::pair<int, int>, int> pair_count;

  double open_frequency(int line_id) const;
};

TopologyCensus topology_census(const TrainingSet& train);

// Objective of every distinct training topology on every test instance.
struct GapMatrix {
  std::vector<Topology> topologies;  // rows, census order
  int num_tests = 0;
  std::vector<double> objective;  // row-major
  std::vector<double> gap;        // against best_known of the column
  std::vector<char> feasible;
  std::vector<double> best_known;  // per test

  double obj_at(int r, int c) const { return objective[static_cast<size_t>(r) * num_tests + c]; }
  double gap_at(int r, int c) const { return gap[static_cast<size_t>(r) * num_tests + c]; }
  bool feasible_at(int r, int c) const {
    return feasible[static_cast<size_t>(r) * num_tests + c] != 0;
  }
};

// exact_objectives, when given, tightens each column's best-known value
// (e.g. with results from full solves of the test instances).
GapMatrix cross_evaluate(const TrainingSet& train, const std::vector<DcotsInstance>& tests,
                         const std::vector<double>* exact_objectives = nullptr, int workers = 1);

// For each test: how deep into the distance ranking one must go to reach the
// best available topology, or any topology within epsilon of best.
struct CardinalReport {
  double epsilon = 0.0;
  double norm_p = 2.0;
  std::vector<int> rank_of_best;     // 1-based; rank among usable entries
  std::vector<int> rank_within_eps;  // -1 when no entry gets within epsilon
};

CardinalReport cardinal_distances(const TrainingSet& train,
                                  const std::vector<DcotsInstance>& tests, double epsilon,
                                  const GapMatrix& matrix, double norm_p = 2.0);

// Leave-one-out evaluation over the training instances themselves.
// Requires entries[i] to be the solve of instances[i].
struct LoocvReport {
  int k = 0;
  double norm_p = 2.0;
  std::vector<int> indexes;  // instances that went into the statistics
  std::vector<double> gaps;  // aligned with indexes
  double mean_gap = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
};

LoocvReport loocv(const std::vector<DcotsInstance>& instances, const TrainingSet& train,
                  const KnnConfig& cfg = {}, int workers = 1);

// Buses grouped by which topology a demand bump at that bus leads to.
struct BusClasses {
  double delta_pu = 1.0;
  std::vector<int> class_of_bus;             // by bus index, -1 when unclassified
  std::vector<std::vector<int>> members;     // class -> bus indexes
  std::vector<Topology> representative;      // class -> open set
  std::vector<std::pair<int, int>> near_pairs;  // classes differing by <= 1 line
  std::vector<std::string> bus_errors;       // by bus index, empty = solved
};

BusClasses bus_classes(const DcotsInstance& base, double delta_pu, double rel_gap = 0.01,
                       double time_limit_seconds = 600.0, int workers = 1);

// Nearest-neighbor reuse where distances are taken between class-aggregated
// demand vectors (costs held out) instead of raw parameter vectors.
HeuristicResult aggregated_knn(const DcotsInstance& inst, const TrainingSet& train,
                               const BusClasses& classes, const KnnConfig& cfg = {},
                               int workers = 1);

// Perturbs demand along random unit directions with growing radius and
// reports how far the exact optimal topology survives. A tied optimum makes
// the notion vacuous; the radius is then reported as zero.
struct StabilityReport {
  bool unique_optimum = false;
  double stable_radius = 0.0;
  int directions = 0;
  std::vector<double> radii;
  std::vector<double> stable_fraction;  // aligned with radii
};

StabilityReport stability_probe(const DcotsInstance& inst, int directions,
                                const std::vector<double>& radius_schedule,
                                std::uint64_t seed = 0, long max_topologies = 100000,
                                int workers = 1);

struct FeasibilitySummary {
  int solution_count = 0;
  double max_shed_mw = 0.0;
  double mean_shed_mw = 0.0;
  int shed_events = 0;
  int over_generation_events = 0;
};

FeasibilitySummary feasibility_report(const std::vector<DispatchSolution>& solutions,
                                      double base_mva);

// File emitters. Every analysis writes a CSV of its per-observation rows and
// a JSON summary; numbers are rendered shortest-round-trip so identical
// inputs give identical bytes.
void write_census(const TopologyCensus& census, const std::string& csv_path,
                  const std::string& json_path);
void write_gap_matrix(const GapMatrix& matrix, const std::string& csv_path,
                      const std::string& json_path);
void write_cardinal(const CardinalReport& report, const std::string& csv_path,
                    const std::string& json_path);
void write_loocv(const LoocvReport& report, const std::string& csv_path,
                 const std::string& json_path);
void write_classes(const BusClasses& classes, const Network& net, const std::string& csv_path,
                   const std::string& json_path);
void write_stability(const StabilityReport& report, const std::string& csv_path,
                     const std::string& json_path);
// all_closed must be the dispatch behind stats (every line closed); the CSV
// reports per-line loading of that dispatch.
void write_congestion(const CongestionStats& stats, const DispatchSolution& all_closed,
                      const Network& net, const std::string& csv_path,
                      const std::string& json_path);
void write_feasibility(const std::vector<DispatchSolution>& solutions,
                       const FeasibilitySummary& summary, double base_mva,
                       const std::string& csv_path, const std::string& json_path);

}  // namespace ots
