#include "analysis.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ots {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string join_lines(const std::vector<int>& ids) {
  std::string s;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(ids[i]);
  }
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  return out;
}

void dump_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed while writing file: " + path);
}

}  // namespace

double TopologyCensus::open_frequency(int line_id) const {
  auto it = line_open_count.find(line_id);
  if (it == line_open_count.end() || unique_topologies.empty()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(unique_topologies.size());
}

TopologyCensus topology_census(const TrainingSet& train) {
  TopologyCensus census;
  std::map<std::vector<int>, int> seen;  // open set -> multiplicity
  for (const auto& e : train.entries) {
    if (!e.error.empty()) continue;
    ++census.usable_entries;
    ++seen[e.topology.open_lines];
  }
  for (const auto& [open, count] : seen) {
    census.unique_topologies.push_back(Topology{open});
    census.multiplicity.push_back(count);
    for (size_t i = 0; i < open.size(); ++i) {
      ++census.line_open_count[open[i]];
      for (size_t j = i + 1; j < open.size(); ++j)
        ++census.pair_count[{open[i], open[j]}];
    }
  }
  return census;
}

GapMatrix cross_evaluate(const TrainingSet& train, const std::vector<DcotsInstance>& tests,
                         const std::vector<double>* exact_objectives, int workers) {
  if (tests.empty()) throw InvalidArgument("cross evaluation needs at least one test instance");
  if (exact_objectives && exact_objectives->size() != tests.size())
    throw InvalidArgument("exact objective vector does not match the test count");

  TopologyCensus census = topology_census(train);
  if (census.unique_topologies.empty())
    throw InvalidArgument("training set has no usable entries");

  GapMatrix m;
  m.topologies = census.unique_topologies;
  m.num_tests = static_cast<int>(tests.size());
  size_t cells = m.topologies.size() * tests.size();
  m.objective.resize(cells);
  m.gap.resize(cells);
  m.feasible.resize(cells);

  // Pricing a topology on a test must not trip that test's own cardinality
  // limit; the evaluation is unrestricted by design.
  std::vector<DcotsInstance> open_tests = tests;
  for (auto& t : open_tests) t.cardinality_k.reset();

  parallel_for(static_cast<int>(cells), workers, [&](int cell) {
    int r = cell / m.num_tests;
    int c = cell % m.num_tests;
    DispatchSolution d = evaluate_topology(open_tests[c], m.topologies[r]);
    m.objective[cell] = d.total_objective;
    m.feasible[cell] = d.feasible ? 1 : 0;
  });

  m.best_known.assign(tests.size(), kInf);
  for (size_t c = 0; c < tests.size(); ++c) {
    for (size_t r = 0; r < m.topologies.size(); ++r)
      m.best_known[c] = std::min(m.best_known[c], m.obj_at(static_cast<int>(r), static_cast<int>(c)));
    if (exact_objectives) m.best_known[c] = std::min(m.best_known[c], (*exact_objectives)[c]);
  }
  for (size_t r = 0; r < m.topologies.size(); ++r)
    for (size_t c = 0; c < tests.size(); ++c) {
      size_t cell = r * tests.size() + c;
      m.gap[cell] = relative_gap(m.objective[cell], m.best_known[c]);
    }
  return m;
}

CardinalReport cardinal_distances(const TrainingSet& train,
                                  const std::vector<DcotsInstance>& tests, double epsilon,
                                  const GapMatrix& matrix, double norm_p) {
  if (epsilon < 0.0) throw InvalidArgument("epsilon must be non-negative");
  if (matrix.num_tests != static_cast<int>(tests.size()))
    throw InvalidArgument("gap matrix does not match the test instances");

  // Map each usable entry to its row in the matrix.
  std::map<std::vector<int>, int> row_of;
  for (size_t r = 0; r < matrix.topologies.size(); ++r)
    row_of[matrix.topologies[r].open_lines] = static_cast<int>(r);

  CardinalReport rep;
  rep.epsilon = epsilon;
  rep.norm_p = norm_p;

  KnnConfig cfg;
  cfg.k = static_cast<int>(train.entries.size());
  cfg.norm_p = norm_p;

  for (size_t c = 0; c < tests.size(); ++c) {
    std::vector<KnnMatch> ranked = knn_select(train, parameter_vector(tests[c]), cfg);
    int best_rank = -1, eps_rank = -1;
    double col_best = matrix.best_known[c];
    for (size_t pos = 0; pos < ranked.size(); ++pos) {
      auto it = row_of.find(train.entries[ranked[pos].index].topology.open_lines);
      if (it == row_of.end()) continue;
      double obj = matrix.obj_at(it->second, static_cast<int>(c));
      double gap = matrix.gap_at(it->second, static_cast<int>(c));
      if (best_rank < 0 && obj <= col_best + 1e-9 * std::max(1.0, std::abs(col_best)))
        best_rank = static_cast<int>(pos) + 1;
      if (eps_rank < 0 && gap <= epsilon) eps_rank = static_cast<int>(pos) + 1;
      if (best_rank >= 0 && eps_rank >= 0) break;
    }
    rep.rank_of_best.push_back(best_rank);
    rep.rank_within_eps.push_back(eps_rank);
  }
  return rep;
}

LoocvReport loocv(const std::vector<DcotsInstance>& instances, const TrainingSet& train,
                  const KnnConfig& cfg, int workers) {
  if (instances.size() != train.entries.size())
    throw InvalidArgument("training set is not aligned with the instances");
  for (size_t i = 0; i < instances.size(); ++i) {
    if (!train.entries[i].error.empty()) continue;
    if (train.entries[i].q != parameter_vector(instances[i]))
      throw InvalidArgument("training entry " + std::to_string(i) +
                            " does not match its instance");
  }

  LoocvReport rep;
  rep.k = cfg.k;
  rep.norm_p = cfg.norm_p;

  std::vector<double> gap_of(instances.size(), std::nan(""));
  parallel_for(static_cast<int>(instances.size()), workers, [&](int i) {
    if (!train.entries[i].error.empty()) return;
    std::vector<KnnMatch> matches;
    try {
      matches = knn_select(train, train.entries[i].q, cfg, instances[i].cardinality_k, i);
    } catch (const InvalidArgument&) {
      return;  // nothing usable once entry i is held out
    }
    double z = kInf;
    for (const auto& m : matches) {
      DispatchSolution d = evaluate_topology(instances[i], train.entries[m.index].topology);
      z = std::min(z, d.total_objective);
    }
    double best = std::min(train.entries[i].objective, z);
    gap_of[i] = relative_gap(z, best);
  });

  for (size_t i = 0; i < instances.size(); ++i) {
    if (std::isnan(gap_of[i])) continue;
    rep.indexes.push_back(static_cast<int>(i));
    rep.gaps.push_back(gap_of[i]);
  }
  if (rep.gaps.empty()) throw InvalidArgument("no instance was usable for leave-one-out");

  rep.min_gap = kInf;
  rep.max_gap = -kInf;
  double sum = 0.0;
  for (double g : rep.gaps) {
    sum += g;
    rep.min_gap = std::min(rep.min_gap, g);
    rep.max_gap = std::max(rep.max_gap, g);
  }
  rep.mean_gap = sum / static_cast<double>(rep.gaps.size());
  return rep;
}

BusClasses bus_classes(const DcotsInstance& base, double delta_pu, double rel_gap,
                       double time_limit_seconds, int workers) {
  check_instance(base);
  if (!(delta_pu > 0.0)) throw InvalidArgument("demand bump must be positive");

  int nb = base.network->num_buses();
  BusClasses out;
  out.delta_pu = delta_pu;
  out.class_of_bus.assign(nb, -1);
  out.bus_errors.assign(nb, "");

  std::vector<std::optional<Topology>> topo_of(nb);
  parallel_for(nb, workers, [&](int b) {
    DcotsInstance bumped = base;
    bumped.demand_pu[b] += delta_pu;
    try {
      topo_of[b] = solve_dcots(bumped, rel_gap, time_limit_seconds).topology;
    } catch (const Error& e) {
      out.bus_errors[b] = e.what();
    }
  });

  std::map<std::vector<int>, int> class_of;
  for (int b = 0; b < nb; ++b) {
    if (!topo_of[b]) continue;
    auto [it, inserted] =
        class_of.emplace(topo_of[b]->open_lines, static_cast<int>(out.members.size()));
    if (inserted) {
      out.members.push_back({});
      out.representative.push_back(*topo_of[b]);
    }
    out.class_of_bus[b] = it->second;
    out.members[it->second].push_back(b);
  }

  for (size_t i = 0; i < out.representative.size(); ++i)
    for (size_t j = i + 1; j < out.representative.size(); ++j) {
      std::vector<int> diff;
      std::set_symmetric_difference(out.representative[i].open_lines.begin(),
                                    out.representative[i].open_lines.end(),
                                    out.representative[j].open_lines.begin(),
                                    out.representative[j].open_lines.end(),
                                    std::back_inserter(diff));
      if (diff.size() <= 1)
        out.near_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    }
  return out;
}

HeuristicResult aggregated_knn(const DcotsInstance& inst, const TrainingSet& train,
                               const BusClasses& classes, const KnnConfig& cfg, int workers) {
  auto t0 = std::chrono::steady_clock::now();
  check_instance(inst);
  if (cfg.k < 1) throw InvalidArgument("k must be at least 1");
  if (classes.members.empty()) throw InvalidArgument("bus classing has no classes");

  size_t ng = inst.gen_cost.size();
  size_t nb = inst.demand_pu.size();

  auto aggregate = [&](const double* demand) {
    std::vector<double> agg(classes.members.size(), 0.0);
    for (size_t c = 0; c < classes.members.size(); ++c)
      for (int b : classes.members[c]) agg[c] += demand[b];
    double norm = 0.0;
    for (double x : agg) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : agg) x /= norm;
    return agg;
  };

  std::vector<double> query = aggregate(inst.demand_pu.data());

  std::vector<KnnMatch> matches;
  for (int i = 0; i < static_cast<int>(train.entries.size()); ++i) {
    const TrainingEntry& e = train.entries[i];
    if (!e.error.empty()) continue;
    if (inst.cardinality_k && e.topology.open_count() > *inst.cardinality_k) continue;
    if (e.q.size() != ng + nb)
      throw InvalidArgument("training entry " + std::to_string(i) +
                            " has a parameter vector of different length");
    std::vector<double> agg = aggregate(e.q.data() + ng);
    double d = 0.0;
    for (size_t c = 0; c < agg.size(); ++c) {
      double diff = agg[c] - query[c];
      d += diff * diff;
    }
    matches.push_back({i, std::sqrt(d)});
  }
  if (matches.empty()) throw InvalidArgument("training set has no usable entries for this query");
  std::sort(matches.begin(), matches.end(), [](const KnnMatch& a, const KnnMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  if (static_cast<int>(matches.size()) > cfg.k) matches.resize(cfg.k);

  std::vector<DispatchSolution> dispatches(matches.size());
  parallel_for(static_cast<int>(matches.size()), workers, [&](int i) {
    dispatches[i] = evaluate_topology(inst, train.entries[matches[i].index].topology);
  });

  int best = 0;
  for (size_t i = 1; i < matches.size(); ++i)
    if (dispatches[i].total_objective < dispatches[best].total_objective)
      best = static_cast<int>(i);

  HeuristicResult out;
  out.topology = train.entries[matches[best].index].topology;
  out.dispatch = dispatches[best];
  out.candidate_count = static_cast<int>(matches.size());
  out.method = "knn-aggregated";
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace {

// Exact best topology plus whether it is unique within a relative 1e-9 band.
struct ExactBest {
  Topology topology;
  double objective = kInf;
  int tie_count = 0;
};

ExactBest exact_best(const DcotsInstance& inst, long max_topologies) {
  ExactBest best;
  bool have = false;
  std::vector<std::pair<std::vector<int>, double>> all;
  for_each_topology(inst, max_topologies, [&](const Topology& topo) {
    DispatchSolution d = evaluate_topology(inst, topo);
    all.push_back({topo.open_lines, d.total_objective});
    if (!have ||
        d.total_objective < best.objective - 1e-9 * std::max(1.0, std::abs(best.objective))) {
      best.topology = topo;
      best.objective = d.total_objective;
      have = true;
    }
  });
  for (const auto& [open, obj] : all)
    if (obj <= best.objective + 1e-9 * std::max(1.0, std::abs(best.objective))) ++best.tie_count;
  return best;
}

}  // namespace

StabilityReport stability_probe(const DcotsInstance& inst, int directions,
                                const std::vector<double>& radius_schedule, std::uint64_t seed,
                                long max_topologies, int workers) {
  check_instance(inst);
  if (directions < 1) throw InvalidArgument("need at least one direction");
  for (size_t i = 0; i < radius_schedule.size(); ++i) {
    if (!(radius_schedule[i] > 0.0))
      throw InvalidArgument("radii must be positive");
    if (i > 0 && radius_schedule[i] <= radius_schedule[i - 1])
      throw InvalidArgument("radii must be strictly increasing");
  }

  StabilityReport rep;
  rep.directions = directions;
  rep.radii = radius_schedule;
  rep.stable_fraction.assign(radius_schedule.size(), 0.0);

  ExactBest base = exact_best(inst, max_topologies);
  rep.unique_optimum = base.tie_count == 1;

  int nb = inst.network->num_buses();
  std::vector<std::vector<double>> dir(directions, std::vector<double>(nb, 0.0));
  for (int d = 0; d < directions; ++d) {
    double norm = 0.0;
    for (int b = 0; b < nb; ++b) {
      dir[d][b] = gaussian(key_hash(seed, Stream::Direction, d, b));
      norm += dir[d][b] * dir[d][b];
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (int b = 0; b < nb; ++b) dir[d][b] /= norm;
    else
      dir[d][0] = 1.0;
  }

  int cells = directions * static_cast<int>(radius_schedule.size());
  std::vector<char> stable(cells, 0);
  parallel_for(cells, workers, [&](int cell) {
    int d = cell / static_cast<int>(radius_schedule.size());
    int r = cell % static_cast<int>(radius_schedule.size());
    DcotsInstance probe = inst;
    for (int b = 0; b < nb; ++b) probe.demand_pu[b] += radius_schedule[r] * dir[d][b];
    ExactBest moved = exact_best(probe, max_topologies);
    stable[cell] = moved.topology.open_lines == base.topology.open_lines ? 1 : 0;
  });

  for (size_t r = 0; r < radius_schedule.size(); ++r) {
    int ok = 0;
    for (int d = 0; d < directions; ++d)
      ok += stable[d * radius_schedule.size() + r];
    rep.stable_fraction[r] = static_cast<double>(ok) / directions;
    if (rep.unique_optimum && ok == directions)
      rep.stable_radius = std::max(rep.stable_radius, radius_schedule[r]);
  }
  if (!rep.unique_optimum) rep.stable_radius = 0.0;
  return rep;
}

FeasibilitySummary feasibility_report(const std::vector<DispatchSolution>& solutions,
                                      double base_mva) {
  FeasibilitySummary sum;
  sum.solution_count = static_cast<int>(solutions.size());
  double total = 0.0;
  for (const auto& s : solutions) {
    double shed = 0.0, over = 0.0;
    for (double u : s.load_shed_pu) shed += u;
    for (double v : s.over_gen_pu) over += v;
    shed *= base_mva;
    over *= base_mva;
    total += shed;
    sum.max_shed_mw = std::max(sum.max_shed_mw, shed);
    if (shed > 1e-6 * base_mva) ++sum.shed_events;
    if (over > 1e-6 * base_mva) ++sum.over_generation_events;
  }
  sum.mean_shed_mw = solutions.empty() ? 0.0 : total / static_cast<double>(solutions.size());
  return sum;
}

void write_census(const TopologyCensus& census, const std::string& csv_path,
                  const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "line_id,open_count,open_frequency\n";
  for (const auto& [line, count] : census.line_open_count)
    csv << line << "," << count << "," << fmt(census.open_frequency(line)) << "\n";

  nlohmann::ordered_json j;
  j["usable_entries"] = census.usable_entries;
  j["unique_topologies"] = census.unique_topologies.size();
  nlohmann::ordered_json topos = nlohmann::ordered_json::array();
  for (size_t i = 0; i < census.unique_topologies.size(); ++i) {
    nlohmann::ordered_json t;
    t["open_lines"] = census.unique_topologies[i].open_lines;
    t["entries"] = census.multiplicity[i];
    topos.push_back(t);
  }
  j["topologies"] = topos;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& [pair, count] : census.pair_count) {
    nlohmann::ordered_json p;
    p["lines"] = {pair.first, pair.second};
    p["count"] = count;
    pairs.push_back(p);
  }
  j["pair_counts"] = pairs;
  dump_json(j, json_path);
}

void write_gap_matrix(const GapMatrix& m, const std::string& csv_path,
                      const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "topology,test_index,objective,gap,feasible\n";
  for (size_t r = 0; r < m.topologies.size(); ++r)
    for (int c = 0; c < m.num_tests; ++c)
      csv << join_lines(m.topologies[r].open_lines) << "," << c << ","
          << fmt(m.obj_at(static_cast<int>(r), c)) << "," << fmt(m.gap_at(static_cast<int>(r), c))
          << "," << (m.feasible_at(static_cast<int>(r), c) ? 1 : 0) << "\n";

  nlohmann::ordered_json j;
  j["topology_count"] = m.topologies.size();
  j["test_count"] = m.num_tests;
  j["best_known"] = m.best_known;
  std::vector<double> min_gap(m.num_tests, kInf);
  for (size_t r = 0; r < m.topologies.size(); ++r)
    for (int c = 0; c < m.num_tests; ++c)
      min_gap[c] = std::min(min_gap[c], m.gap_at(static_cast<int>(r), c));
  j["min_gap_per_test"] = min_gap;
  dump_json(j, json_path);
}

void write_cardinal(const CardinalReport& rep, const std::string& csv_path,
                    const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "test_index,rank_of_best,rank_within_eps\n";
  for (size_t c = 0; c < rep.rank_of_best.size(); ++c)
    csv << c << "," << rep.rank_of_best[c] << "," << rep.rank_within_eps[c] << "\n";

  nlohmann::ordered_json j;
  j["epsilon"] = rep.epsilon;
  j["norm"] = rep.norm_p;
  j["rank_of_best"] = rep.rank_of_best;
  j["rank_within_eps"] = rep.rank_within_eps;
  dump_json(j, json_path);
}

void write_loocv(const LoocvReport& rep, const std::string& csv_path,
                 const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "instance,gap\n";
  for (size_t i = 0; i < rep.indexes.size(); ++i)
    csv << rep.indexes[i] << "," << fmt(rep.gaps[i]) << "\n";

  nlohmann::ordered_json j;
  j["k"] = rep.k;
  j["norm"] = rep.norm_p;
  j["instances"] = rep.indexes.size();
  j["mean_gap"] = rep.mean_gap;
  j["min_gap"] = rep.min_gap;
  j["max_gap"] = rep.max_gap;
  j["gaps"] = rep.gaps;
  dump_json(j, json_path);
}

void write_classes(const BusClasses& classes, const Network& net, const std::string& csv_path,
                   const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "bus,class\n";
  for (size_t b = 0; b < classes.class_of_bus.size(); ++b)
    csv << net.buses[b].id << "," << classes.class_of_bus[b] << "\n";

  nlohmann::ordered_json j;
  j["delta_pu"] = classes.delta_pu;
  j["class_count"] = classes.members.size();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (size_t c = 0; c < classes.members.size(); ++c) {
    nlohmann::ordered_json e;
    e["id"] = c;
    std::vector<int> labels;
    for (int b : classes.members[c]) labels.push_back(net.buses[b].id);
    e["buses"] = labels;
    e["open_lines"] = classes.representative[c].open_lines;
    arr.push_back(e);
  }
  j["classes"] = arr;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (auto [a, b] : classes.near_pairs) pairs.push_back({a, b});
  j["near_pairs"] = pairs;
  nlohmann::ordered_json errs = nlohmann::ordered_json::object();
  for (size_t b = 0; b < classes.bus_errors.size(); ++b)
    if (!classes.bus_errors[b].empty())
      errs[std::to_string(net.buses[b].id)] = classes.bus_errors[b];
  j["errors"] = errs;
  dump_json(j, json_path);
}

void write_stability(const StabilityReport& rep, const std::string& csv_path,
                     const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "radius,stable_fraction\n";
  for (size_t r = 0; r < rep.radii.size(); ++r)
    csv << fmt(rep.radii[r]) << "," << fmt(rep.stable_fraction[r]) << "\n";

  nlohmann::ordered_json j;
  j["directions"] = rep.directions;
  j["unique_optimum"] = rep.unique_optimum;
  j["stable_radius"] = rep.stable_radius;
  j["radii"] = rep.radii;
  j["stable_fraction"] = rep.stable_fraction;
  dump_json(j, json_path);
}

void write_feasibility(const std::vector<DispatchSolution>& solutions,
                       const FeasibilitySummary& summary, double base_mva,
                       const std::string& csv_path, const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "solution,shed_mw,over_generation_mw,feasible\n";
  for (size_t i = 0; i < solutions.size(); ++i) {
    double shed = 0.0, over = 0.0;
    for (double u : solutions[i].load_shed_pu) shed += u;
    for (double v : solutions[i].over_gen_pu) over += v;
    csv << i << "," << fmt(shed * base_mva) << "," << fmt(over * base_mva) << ","
        << (solutions[i].feasible ? 1 : 0) << "\n";
  }

  nlohmann::ordered_json j;
  j["solution_count"] = summary.solution_count;
  j["max_shed_mw"] = summary.max_shed_mw;
  j["mean_shed_mw"] = summary.mean_shed_mw;
  j["shed_events"] = summary.shed_events;
  j["over_generation_events"] = summary.over_generation_events;
  dump_json(j, json_path);
}

void write_congestion(const CongestionStats& stats, const DispatchSolution& all_closed,
                      const Network& net, const std::string& csv_path,
                      const std::string& json_path) {
  std::ofstream csv = open_out(csv_path);
  csv << "line_id,flow_mw,limit_mw,utilization,binding\n";
  std::vector<int> binding_lines;
  for (const auto& l : net.lines) {
    double flow = std::abs(all_closed.flow_pu[l.id]);
    // Same binding test as congestion_stats.
    bool binding = l.flow_limit_pu - flow <= 1e-6 * std::max(1.0, l.flow_limit_pu);
    if (binding) binding_lines.push_back(l.id);
    csv << l.id << "," << fmt(all_closed.flow_pu[l.id] * net.base_mva) << ","
        << fmt(l.flow_limit_pu * net.base_mva) << ","
        << fmt(l.flow_limit_pu > 0 ? flow / l.flow_limit_pu : 0.0) << "," << (binding ? 1 : 0)
        << "\n";
  }

  nlohmann::ordered_json j;
  j["binding_fraction"] = stats.binding_fraction;
  j["all_closed_objective"] = stats.all_closed_objective;
  j["best_objective"] = stats.best_objective;
  j["switching_gain"] = stats.switching_gain;
  j["binding_lines"] = binding_lines;
  dump_json(j, json_path);
}

}  // namespace ots
