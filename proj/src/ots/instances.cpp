#include "instances.hpp"

#include <algorithm>
#include <filesystem>

#include "matpower.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ots {

std::vector<DcotsInstance> generate_instances(std::shared_ptr<const Network> net,
                                              const GenerationSpec& spec,
                                              std::optional<int> cardinality_k,
                                              double infeasibility_cost) {
  if (!net) throw InvalidArgument("generate_instances needs a network");
  if (spec.count < 1) throw InvalidArgument("instance count must be positive");
  if (spec.test_count < 0 || spec.test_count > spec.count)
    throw InvalidArgument("test count must lie between 0 and the instance count");
  if (!(spec.demand_band[0] <= spec.demand_band[1]) ||
      !(spec.cost_band[0] <= spec.cost_band[1]))
    throw InvalidArgument("perturbation bands must be ordered");

  DcotsInstance base = nominal_instance(net, cardinality_k, infeasibility_cost);
  std::vector<DcotsInstance> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    DcotsInstance inst = base;
    for (int b = 0; b < net->num_buses(); ++b)
      inst.demand_pu[b] *= uniform_in(spec.demand_band[0], spec.demand_band[1],
                                      key_hash(spec.seed, Stream::Demand, i, b));
    for (int g = 0; g < net->num_generators(); ++g)
      inst.gen_cost[g] *= uniform_in(spec.cost_band[0], spec.cost_band[1],
                                     key_hash(spec.seed, Stream::Cost, i, g));
    out.push_back(std::move(inst));
  }
  return out;
}

SplitIndices split_train_test(int count, const GenerationSpec& spec) {
  if (spec.test_count < 0 || spec.test_count > count)
    throw InvalidArgument("test count must lie between 0 and the instance count");
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  for (int i = count - 1; i > 0; --i) {
    int j = static_cast<int>(key_hash(spec.seed, Stream::Split, i, 0) % (i + 1));
    std::swap(order[i], order[j]);
  }
  SplitIndices split;
  split.test.assign(order.begin(), order.begin() + spec.test_count);
  split.train.assign(order.begin() + spec.test_count, order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

namespace {

TrainingEntry solve_entry(const DcotsInstance& base, const TrainOptions& opts) {
  DcotsInstance inst = base;
  if (opts.cardinality_k) inst.cardinality_k = opts.cardinality_k;
  TrainingEntry e;
  e.q = parameter_vector(inst);
  try {
    DcotsResult res = solve_dcots(inst, opts.rel_gap, opts.time_limit_seconds);
    e.topology = res.topology;
    e.objective = res.dispatch.total_objective;
    e.mip_gap = res.mip.gap;
    e.solve_seconds = res.mip.wall_seconds;
  } catch (const Error& err) {
    e.error = err.what();
  }
  return e;
}

TrainingSet make_header(const std::vector<DcotsInstance>& instances, const TrainOptions& opts) {
  if (instances.empty()) throw InvalidArgument("there are no instances to train on");
  TrainingSet train;
  train.network_fingerprint = case_fingerprint(*instances.front().network);
  train.cardinality =
      opts.cardinality_k ? opts.cardinality_k : instances.front().cardinality_k;
  return train;
}

}  // namespace

TrainingSet train(const std::vector<DcotsInstance>& instances, const TrainOptions& opts,
                  const TrainProgress& progress) {
  TrainingSet out = make_header(instances, opts);
  out.entries.resize(instances.size());
  std::atomic<int> done{0};
  parallel_for(static_cast<int>(instances.size()), opts.workers, [&](int i) {
    out.entries[i] = solve_entry(instances[i], opts);
    int d = ++done;
    if (progress) progress(d, static_cast<int>(instances.size()));
  });
  return out;
}

TrainingSet train_to_file(const std::vector<DcotsInstance>& instances, const std::string& path,
                          const TrainOptions& opts, bool resume, const TrainProgress& progress) {
  TrainingSet out = make_header(instances, opts);

  size_t already = 0;
  if (resume && std::filesystem::exists(path)) {
    TrainingSet prior = load_training_set(path);
    bool header_matches =
        prior.network_fingerprint == out.network_fingerprint && prior.cardinality == out.cardinality;
    if (!header_matches)
      throw InvalidArgument("existing training file belongs to a different setup: " + path);
    if (prior.entries.size() > instances.size())
      throw InvalidArgument("existing training file has more entries than instances: " + path);
    already = prior.entries.size();
    out.entries = std::move(prior.entries);
  } else {
    save_training_set(out, path, opts.suppress_timing);
  }

  out.entries.resize(instances.size());
  int total = static_cast<int>(instances.size());
  int todo = total - static_cast<int>(already);

  // Entries are appended strictly in instance order as soon as every earlier
  // instance has finished, so an interrupted run leaves a clean prefix.
  std::mutex io_mutex;
  size_t flushed = already;
  int done_count = static_cast<int>(already);
  std::vector<char> ready(instances.size(), 0);
  for (size_t i = 0; i < already; ++i) ready[i] = 1;

  parallel_for(todo, opts.workers, [&](int offset) {
    int i = static_cast<int>(already) + offset;
    TrainingEntry e = solve_entry(instances[i], opts);
    std::lock_guard<std::mutex> lock(io_mutex);
    out.entries[i] = std::move(e);
    ready[i] = 1;
    if (progress) progress(++done_count, total);
    size_t first = flushed;
    while (flushed < instances.size() && ready[flushed]) ++flushed;
    if (flushed > first) {
      TrainingSet view;
      view.entries.assign(out.entries.begin() + first, out.entries.begin() + flushed);
      append_training_entries(view, 0, path, opts.suppress_timing);
    }
  });
  return out;
}

}  // namespace ots
