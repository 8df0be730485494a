#include "heuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "json.hpp"
#include "matpower.hpp"
#include "parallel.hpp"

namespace ots {

namespace {

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> normalized(const std::vector<double>& q) {
  double norm = 0.0;
  for (double x : q) norm += x * x;
  norm = std::sqrt(norm);
  if (norm <= 0.0) return q;
  std::vector<double> out(q.size());
  for (size_t i = 0; i < q.size(); ++i) out[i] = q[i] / norm;
  return out;
}

double minkowski(const std::vector<double>& a, const std::vector<double>& b, double p) {
  if (std::isinf(p)) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      double d = a[i] - b[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  if (p == 1.0) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

std::vector<double> parameter_vector(const DcotsInstance& inst) {
  std::vector<double> q;
  q.reserve(inst.gen_cost.size() + inst.demand_pu.size());
  q.insert(q.end(), inst.gen_cost.begin(), inst.gen_cost.end());
  q.insert(q.end(), inst.demand_pu.begin(), inst.demand_pu.end());
  return q;
}

double parse_norm(const std::string& text) {
  if (text == "euclidean" || text == "l2" || text == "2") return 2.0;
  if (text == "manhattan" || text == "l1" || text == "1") return 1.0;
  if (text == "infinity" || text == "inf" || text == "linf" || text == "max")
    return std::numeric_limits<double>::infinity();
  try {
    size_t used = 0;
    double p = std::stod(text, &used);
    if (used == text.size() && p >= 1.0) return p;
  } catch (...) {
  }
  throw InvalidArgument("unknown distance norm '" + text + "'");
}

std::vector<KnnMatch> knn_select(const TrainingSet& train, const std::vector<double>& q,
                                 const KnnConfig& cfg, std::optional<int> max_open_lines,
                                 int exclude_index) {
  if (cfg.k < 1) throw InvalidArgument("k must be at least 1");
  if (!(cfg.norm_p >= 1.0)) throw InvalidArgument("distance exponent must be at least 1");
  if (q.empty()) throw InvalidArgument("query parameter vector is empty");

  std::vector<double> qn = normalized(q);
  std::vector<KnnMatch> matches;
  for (int i = 0; i < static_cast<int>(train.entries.size()); ++i) {
    const TrainingEntry& e = train.entries[i];
    if (i == exclude_index || !e.error.empty()) continue;
    if (max_open_lines && e.topology.open_count() > *max_open_lines) continue;
    if (e.q.size() != q.size())
      throw InvalidArgument("training entry " + std::to_string(i) +
                            " has a parameter vector of different length");
    matches.push_back({i, minkowski(qn, normalized(e.q), cfg.norm_p)});
  }
  if (matches.empty())
    throw InvalidArgument("training set has no usable entries for this query");

  std::sort(matches.begin(), matches.end(), [](const KnnMatch& a, const KnnMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  if (static_cast<int>(matches.size()) > cfg.k) matches.resize(cfg.k);
  return matches;
}

HeuristicResult knn_heuristic(const DcotsInstance& inst, const TrainingSet& train,
                              const KnnConfig& cfg, int workers) {
  auto t0 = std::chrono::steady_clock::now();
  check_instance(inst);
  if (case_fingerprint(*inst.network) != train.network_fingerprint)
    throw InvalidArgument("training data was computed on a different network");

  std::vector<KnnMatch> matches =
      knn_select(train, parameter_vector(inst), cfg, inst.cardinality_k);

  // Identical topologies among the neighbors are priced once.
  std::map<std::vector<int>, int> unique_slot;
  std::vector<const Topology*> unique_topos;
  std::vector<int> slot_of_match(matches.size());
  for (size_t m = 0; m < matches.size(); ++m) {
    const Topology& topo = train.entries[matches[m].index].topology;
    auto [it, inserted] =
        unique_slot.emplace(topo.open_lines, static_cast<int>(unique_topos.size()));
    if (inserted) unique_topos.push_back(&topo);
    slot_of_match[m] = it->second;
  }

  std::vector<DispatchSolution> dispatches(unique_topos.size());
  parallel_for(static_cast<int>(unique_topos.size()), workers,
               [&](int i) { dispatches[i] = evaluate_topology(inst, *unique_topos[i]); });

  int best = -1;
  for (size_t m = 0; m < matches.size(); ++m) {
    const DispatchSolution& d = dispatches[slot_of_match[m]];
    if (best < 0 || d.total_objective < dispatches[slot_of_match[best]].total_objective)
      best = static_cast<int>(m);
  }

  HeuristicResult out;
  out.topology = train.entries[matches[best].index].topology;
  out.dispatch = dispatches[slot_of_match[best]];
  out.candidate_count = static_cast<int>(matches.size());
  out.method = "knn";
  out.wall_seconds = now_seconds(t0);
  return out;
}

HeuristicResult greedy_local_search(const DcotsInstance& inst, int workers) {
  auto t0 = std::chrono::steady_clock::now();
  check_instance(inst);

  HeuristicResult out;
  out.method = "greedy";
  out.topology = Topology{};
  out.dispatch = evaluate_topology(inst, out.topology);
  out.candidate_count = 1;

  std::vector<int> remaining = inst.network->switchable_line_ids();
  int budget = std::min<int>(inst.cardinality_k.value_or(remaining.size()),
                             static_cast<int>(remaining.size()));

  for (int round = 0; round < budget && !remaining.empty(); ++round) {
    std::vector<DispatchSolution> trial(remaining.size());
    parallel_for(static_cast<int>(remaining.size()), workers, [&](int i) {
      std::vector<int> open = out.topology.open_lines;
      open.push_back(remaining[i]);
      trial[i] = evaluate_topology(inst, Topology::from_lines(std::move(open)));
    });
    out.candidate_count += static_cast<int>(remaining.size());

    int best = -1;
    for (int i = 0; i < static_cast<int>(remaining.size()); ++i)
      if (best < 0 || trial[i].total_objective < trial[best].total_objective) best = i;

    if (trial[best].total_objective >= out.dispatch.total_objective) break;

    std::vector<int> open = out.topology.open_lines;
    open.push_back(remaining[best]);
    out.topology = Topology::from_lines(std::move(open));
    out.dispatch = trial[best];
    remaining.erase(remaining.begin() + best);
  }

  out.wall_seconds = now_seconds(t0);
  return out;
}

namespace {

nlohmann::ordered_json entry_to_json(const TrainingEntry& e, bool suppress_timing) {
  nlohmann::ordered_json j;
  j["q"] = e.q;
  if (!e.error.empty()) {
    j["error"] = e.error;
    return j;
  }
  j["open_lines"] = e.topology.open_lines;
  j["objective"] = e.objective;
  j["gap"] = e.mip_gap;
  j["seconds"] = suppress_timing ? 0.0 : e.solve_seconds;
  return j;
}

nlohmann::ordered_json header_json(const TrainingSet& train) {
  nlohmann::ordered_json j;
  j["network_fingerprint"] = train.network_fingerprint;
  if (train.cardinality)
    j["cardinality"] = *train.cardinality;
  else
    j["cardinality"] = nullptr;
  return j;
}

}  // namespace

void save_training_set(const TrainingSet& train, const std::string& path, bool suppress_timing) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write training file: " + path);
  out << header_json(train).dump() << "\n";
  for (const auto& e : train.entries) out << entry_to_json(e, suppress_timing).dump() << "\n";
  if (!out) throw IoError("failed while writing training file: " + path);
}

void append_training_entries(const TrainingSet& train, size_t first_entry,
                             const std::string& path, bool suppress_timing) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to training file: " + path);
  for (size_t i = first_entry; i < train.entries.size(); ++i)
    out << entry_to_json(train.entries[i], suppress_timing).dump() << "\n";
  if (!out) throw IoError("failed while writing training file: " + path);
}

TrainingSet load_training_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open training file: " + path);

  TrainingSet train;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (line_no == 1) {
      if (!j.contains("network_fingerprint") || !j["network_fingerprint"].is_string())
        throw ParseError("header must carry a network_fingerprint string", line_no);
      train.network_fingerprint = j["network_fingerprint"].get<std::string>();
      if (j.contains("cardinality") && !j["cardinality"].is_null())
        train.cardinality = j["cardinality"].get<int>();
      continue;
    }
    TrainingEntry e;
    if (!j.contains("q") || !j["q"].is_array())
      throw ParseError("entry is missing its parameter vector", line_no);
    e.q = j["q"].get<std::vector<double>>();
    if (j.contains("error")) {
      e.error = j["error"].get<std::string>();
    } else {
      if (!j.contains("open_lines") || !j.contains("objective"))
        throw ParseError("entry is missing open_lines or objective", line_no);
      e.topology = Topology::from_lines(j["open_lines"].get<std::vector<int>>());
      e.objective = j["objective"].get<double>();
      e.mip_gap = j.value("gap", 0.0);
      e.solve_seconds = j.value("seconds", 0.0);
    }
    train.entries.push_back(std::move(e));
  }
  if (line_no == 0) throw ParseError("empty training set");
  return train;
}

}  // namespace ots
