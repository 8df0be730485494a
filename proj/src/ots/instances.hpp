#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heuristics.hpp"

namespace ots {

struct GenerationSpec {
  int count = 300;
  int test_count = 30;
  std::uint64_t seed = 0;
  std::array<double, 2> demand_band{0.9, 1.1};
  std::array<double, 2> cost_band{0.95, 1.05};
};

// Scales every bus demand and generator cost of the network by independent
// uniform draws from the given bands. Draw i for entity e depends only on
// (seed, stream, i, e), so any subset of instances can be regenerated
// without the rest.
std::vector<DcotsInstance> generate_instances(std::shared_ptr<const Network> net,
                                              const GenerationSpec& spec,
                                              std::optional<int> cardinality_k = std::nullopt,
                                              double infeasibility_cost = 1e6);

struct SplitIndices {
  std::vector<int> train;  // ascending original indexes
  std::vector<int> test;
};

// Seeded shuffle of 0..count-1; the first test_count shuffled positions form
// the test side. Both halves are reported in original index order.
SplitIndices split_train_test(int count, const GenerationSpec& spec);

struct TrainOptions {
  double rel_gap = 0.01;
  double time_limit_seconds = 1800.0;
  std::optional<int> cardinality_k;
  int workers = 1;
  bool suppress_timing = false;
};

// Called after each finished scenario with (done, total).
using TrainProgress = std::function<void(int, int)>;

// Solves every instance to the requested gap and records (parameter vector,
// chosen topology, objective) per instance, in instance order. A scenario
// whose solve throws becomes an error entry instead of aborting the run.
TrainingSet train(const std::vector<DcotsInstance>& instances, const TrainOptions& opts = {},
                  const TrainProgress& progress = {});

// train() that streams entries to a file as they complete, in order. When
// resume is set and the file already holds a matching header and complete
// entries, those instances are skipped.
TrainingSet train_to_file(const std::vector<DcotsInstance>& instances, const std::string& path,
                          const TrainOptions& opts = {}, bool resume = false,
                          const TrainProgress& progress = {});

}  // namespace ots
