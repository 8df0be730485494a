#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcots.hpp"

namespace ots {

// One solved training scenario. A non-empty error marks a scenario whose
// solve failed; such entries are kept for bookkeeping but never selected.
struct TrainingEntry {
  std::vector<double> q;  // parameter vector of the scenario
  Topology topology;
  double objective = 0.0;
  double mip_gap = 0.0;
  double solve_seconds = 0.0;
  std::string error;
};

struct TrainingSet {
  std::string network_fingerprint;
  std::optional<int> cardinality;
  std::vector<TrainingEntry> entries;
};

// Generator costs followed by bus demands, both in network order.
std::vector<double> parameter_vector(const DcotsInstance& inst);

struct KnnConfig {
  int k = 10;
  // Minkowski exponent for the distance; >= 1, infinity() for the max norm.
  double norm_p = 2.0;
};

// Distance exponent from a CLI spelling: "euclidean"/"2", "manhattan"/"1",
// "infinity"/"inf", or any number >= 1.
double parse_norm(const std::string& text);

struct KnnMatch {
  int index;        // position in train.entries
  double distance;  // between the normalized parameter vectors
};

// The k nearest usable entries, sorted by (distance, index). Entries whose
// solve failed, or whose topology opens more than max_open_lines lines, or
// whose index equals exclude_index, are skipped. Throws InvalidArgument when
// nothing remains or dimensions mismatch.
std::vector<KnnMatch> knn_select(const TrainingSet& train, const std::vector<double>& q,
                                 const KnnConfig& cfg = {},
                                 std::optional<int> max_open_lines = std::nullopt,
                                 int exclude_index = -1);

struct HeuristicResult {
  Topology topology;
  DispatchSolution dispatch;
  int candidate_count = 0;  // topology evaluations the method paid for
  double wall_seconds = 0.0;
  std::string method;
};

// Re-uses the topology of a near neighbor: selects k training entries close
// to this instance's parameter vector, prices each of their topologies with
// one LP, and keeps the cheapest. The training set must stem from the same
// network (fingerprint check).
HeuristicResult knn_heuristic(const DcotsInstance& inst, const TrainingSet& train,
                              const KnnConfig& cfg = {}, int workers = 1);

// Opens one line at a time, always the single opening that lowers the
// current objective the most (ties: lowest line id), until no opening helps
// or the cardinality limit is reached. At most K * |lines| + 1 LP solves.
HeuristicResult greedy_local_search(const DcotsInstance& inst, int workers = 1);

// Line-oriented JSON: one header line, then one line per entry, in order.
// suppress_timing zeroes the per-entry seconds so re-runs are byte-stable.
void save_training_set(const TrainingSet& train, const std::string& path,
                       bool suppress_timing = false);
void append_training_entries(const TrainingSet& train, size_t first_entry,
                             const std::string& path, bool suppress_timing = false);
TrainingSet load_training_set(const std::string& path);

}  // namespace ots
