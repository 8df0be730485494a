#include "otswitch.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ots/analysis.hpp"
#include "ots/dcots.hpp"
#include "ots/errors.hpp"
#include "ots/heuristics.hpp"
#include "ots/instances.hpp"
#include "ots/matpower.hpp"
#include "ots/network.hpp"

using nlohmann::ordered_json;

struct ots_network {
  std::shared_ptr<const ots::Network> net;
  std::vector<ots::Diagnostic> parse_warnings;
  std::string fingerprint;
};

struct ots_training {
  ots::TrainingSet set;
};

namespace {

std::string& last_error_slot() {
  thread_local std::string message;
  return message;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* ptr, const char* what) {
  if (!ptr) throw ots::InvalidArgument(std::string("null ") + what);
}

template <typename Body>
ots_status wrap(Body&& body) noexcept {
  last_error_slot().clear();
  try {
    body();
    return OTS_OK;
  } catch (const ots::ParseError& e) {
    last_error_slot() = e.what();
    return OTS_ERR_PARSE;
  } catch (const ots::UnsupportedError& e) {
    last_error_slot() = e.what();
    return OTS_ERR_UNSUPPORTED;
  } catch (const ots::ValidationError& e) {
    last_error_slot() = e.what();
    return OTS_ERR_VALIDATION;
  } catch (const ots::SolveError& e) {
    last_error_slot() = e.what();
    return OTS_ERR_SOLVE;
  } catch (const ots::IoError& e) {
    last_error_slot() = e.what();
    return OTS_ERR_IO;
  } catch (const ots::InvalidArgument& e) {
    last_error_slot() = e.what();
    return OTS_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    last_error_slot() = e.what();
    return OTS_ERR_INTERNAL;
  } catch (...) {
    last_error_slot() = "unknown failure";
    return OTS_ERR_INTERNAL;
  }
}

// Working form of ots_solve_options with library defaults filled in.
struct SolveConfig {
  std::optional<int> cardinality;
  double rel_gap = 0.01;
  double time_limit = 0.0;
  double infeasibility_cost = 1e6;
  int workers = 1;
  bool suppress_timing = false;
  std::string dump_lp_path;
};

SolveConfig make_config(const ots_solve_options* opts) {
  SolveConfig cfg;
  if (!opts) return cfg;
  if (opts->cardinality >= 0) cfg.cardinality = opts->cardinality;
  cfg.rel_gap = opts->rel_gap;
  cfg.time_limit = opts->time_limit_seconds;
  cfg.infeasibility_cost = opts->infeasibility_cost;
  cfg.workers = opts->workers < 1 ? 1 : opts->workers;
  cfg.suppress_timing = opts->suppress_timing != 0;
  if (opts->dump_lp_path) cfg.dump_lp_path = opts->dump_lp_path;
  if (cfg.rel_gap < 0) throw ots::InvalidArgument("rel_gap must be >= 0");
  if (cfg.time_limit < 0) throw ots::InvalidArgument("time limit must be >= 0");
  return cfg;
}

ots::GenerationSpec make_spec(const ots_generation_spec* spec) {
  ots::GenerationSpec gs;
  gs.count = spec->count;
  gs.test_count = spec->test_count;
  gs.seed = spec->seed;
  gs.demand_band = {spec->demand_low, spec->demand_high};
  gs.cost_band = {spec->cost_low, spec->cost_high};
  return gs;
}

ots::DcotsInstance make_instance(const ots_network* net, const SolveConfig& cfg) {
  return ots::nominal_instance(net->net, cfg.cardinality, cfg.infeasibility_cost);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ots::IoError("cannot write file: " + path);
  out << text;
  out.flush();
  if (!out) throw ots::IoError("failed while writing file: " + path);
}

void dump_model_lp(const ots::DcotsInstance& inst, const std::string& path) {
  ots::MipProblem mip = ots::build_dcots_mip(inst);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ots::IoError("cannot write file: " + path);
  ots::write_lp_format(out, mip.lp, mip.integer_vars);
  if (!out) throw ots::IoError("failed while writing file: " + path);
}

const char* mip_status_name(ots::MipStatus status) {
  switch (status) {
    case ots::MipStatus::Optimal: return "optimal";
    case ots::MipStatus::GapLimit: return "gap_limit";
    case ots::MipStatus::TimeLimit: return "time_limit";
    case ots::MipStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

ordered_json dispatch_summary(const std::string& method, const ots::Topology& topo,
                              const ots::DispatchSolution& d, double base_mva,
                              const SolveConfig& cfg) {
  double shed = 0.0, over = 0.0;
  for (double u : d.load_shed_pu) shed += u;
  for (double v : d.over_gen_pu) over += v;
  ordered_json j;
  j["method"] = method;
  j["open_lines"] = topo.open_lines;
  j["total_objective"] = d.total_objective;
  j["generation_cost"] = d.generation_cost;
  j["penalty_cost"] = d.penalty_cost;
  j["load_shed_mw"] = shed * base_mva;
  j["over_generation_mw"] = over * base_mva;
  j["feasible"] = d.feasible;
  j["solve_seconds"] = cfg.suppress_timing ? 0.0 : d.solve_seconds;
  return j;
}

void emit_solution(const char* solution_path, const ots::DispatchSolution& d,
                   const ots::Topology& topo, double base_mva, const SolveConfig& cfg) {
  if (!solution_path) return;
  write_text_file(solution_path, ots::dispatch_to_json(d, topo, base_mva, cfg.suppress_timing));
}

void emit_summary(char** out, const ordered_json& j) {
  if (out) *out = dup_string(j.dump());
}

std::vector<ots::DcotsInstance> side_instances(const ots_network* net,
                                               const ots::GenerationSpec& gs, ots_side side,
                                               const SolveConfig& cfg) {
  std::vector<ots::DcotsInstance> all =
      ots::generate_instances(net->net, gs, cfg.cardinality, cfg.infeasibility_cost);
  if (side == OTS_SIDE_ALL) return all;
  ots::SplitIndices split = ots::split_train_test(gs.count, gs);
  const std::vector<int>& keep = side == OTS_SIDE_TRAIN ? split.train : split.test;
  std::vector<ots::DcotsInstance> out;
  out.reserve(keep.size());
  for (int i : keep) out.push_back(std::move(all[i]));
  return out;
}

double norm_from(const char* norm) {
  return ots::parse_norm(norm && *norm ? norm : "euclidean");
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) s += '|';
    s += std::to_string(ids[i]);
  }
  return s;
}

ots_status parse_common(const char* source, bool is_file, const ots_parse_options* opts,
                        ots_network** out) {
  return wrap([&] {
    require(source, is_file ? "path" : "text");
    require(out, "out");
    ots::ParseOptions po;
    if (opts) {
      po.linearize_cost = opts->linearize_cost != 0;
      po.unlimited_flow_limit_pu = opts->unlimited_flow_limit_pu;
    }
    auto handle = std::make_unique<ots_network>();
    ots::Network parsed = is_file ? ots::parse_case_file(source, po, &handle->parse_warnings)
                                  : ots::parse_case(source, po, &handle->parse_warnings);
    handle->fingerprint = ots::case_fingerprint(parsed);
    handle->net = std::make_shared<const ots::Network>(std::move(parsed));
    *out = handle.release();
  });
}

}  // namespace

extern "C" {

const char* ots_version(void) { return "0.1.0"; }

const char* ots_last_error(void) { return last_error_slot().c_str(); }

void ots_string_free(char* s) { std::free(s); }

/* ---------------------------------------------------------------- network */

void ots_parse_options_init(ots_parse_options* opts) {
  if (!opts) return;
  opts->linearize_cost = 0;
  opts->unlimited_flow_limit_pu = 100.0;
}

ots_status ots_network_parse_file(const char* path, const ots_parse_options* opts,
                                  ots_network** out) {
  return parse_common(path, true, opts, out);
}

ots_status ots_network_parse_text(const char* text, const ots_parse_options* opts,
                                  ots_network** out) {
  return parse_common(text, false, opts, out);
}

void ots_network_free(ots_network* net) { delete net; }

ots_status ots_network_counts(const ots_network* net, int* buses, int* generators, int* lines) {
  return wrap([&] {
    require(net, "network");
    if (buses) *buses = net->net->num_buses();
    if (generators) *generators = net->net->num_generators();
    if (lines) *lines = net->net->num_lines();
  });
}

ots_status ots_network_fingerprint(const ots_network* net, char** out) {
  return wrap([&] {
    require(net, "network");
    require(out, "out");
    *out = dup_string(net->fingerprint);
  });
}

ots_status ots_network_info_json(const ots_network* net, char** out) {
  return wrap([&] {
    require(net, "network");
    require(out, "out");
    const ots::Network& n = *net->net;
    double demand_pu = 0.0;
    for (const auto& b : n.buses) demand_pu += b.demand_pu;
    ordered_json j;
    j["name"] = n.name;
    j["base_mva"] = n.base_mva;
    j["buses"] = n.num_buses();
    j["generators"] = n.num_generators();
    j["lines"] = n.num_lines();
    j["switchable_lines"] = n.switchable_line_ids().size();
    j["total_demand_mw"] = demand_pu * n.base_mva;
    j["fingerprint"] = net->fingerprint;
    ordered_json warnings = ordered_json::array();
    for (const auto& w : net->parse_warnings) warnings.push_back(w.message);
    j["warnings"] = warnings;
    *out = dup_string(j.dump());
  });
}

ots_status ots_network_validate_json(const ots_network* net, char** out) {
  return wrap([&] {
    require(net, "network");
    require(out, "out");
    std::vector<ots::Diagnostic> diags = ots::validate(*net->net);
    ordered_json errors = ordered_json::array();
    ordered_json warnings = ordered_json::array();
    for (const auto& d : diags) {
      if (d.severity == ots::Diagnostic::Severity::Error)
        errors.push_back(d.message);
      else
        warnings.push_back(d.message);
    }
    ordered_json j;
    j["ok"] = errors.empty();
    j["errors"] = errors;
    j["warnings"] = warnings;
    *out = dup_string(j.dump());
  });
}

ots_status ots_network_write_file(const ots_network* net, const char* path) {
  return wrap([&] {
    require(net, "network");
    require(path, "path");
    write_text_file(path, ots::serialize_case(*net->net));
  });
}

/* ------------------------------------------------------------------ solve */

void ots_solve_options_init(ots_solve_options* opts) {
  if (!opts) return;
  opts->cardinality = -1;
  opts->rel_gap = 0.01;
  opts->time_limit_seconds = 0.0;
  opts->infeasibility_cost = 1e6;
  opts->workers = 1;
  opts->suppress_timing = 0;
  opts->dump_lp_path = nullptr;
}

ots_status ots_solve(const ots_network* net, const ots_solve_options* opts,
                     const char* solution_path, char** summary) {
  return wrap([&] {
    require(net, "network");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance inst = make_instance(net, cfg);
    if (!cfg.dump_lp_path.empty()) dump_model_lp(inst, cfg.dump_lp_path);
    ots::DcotsResult res = ots::solve_dcots(inst, cfg.rel_gap, cfg.time_limit);
    emit_solution(solution_path, res.dispatch, res.topology, net->net->base_mva, cfg);
    ordered_json j = dispatch_summary("exact", res.topology, res.dispatch, net->net->base_mva, cfg);
    j["status"] = mip_status_name(res.mip.status);
    j["mip_gap"] = res.mip.gap;
    j["best_bound"] = res.mip.best_bound;
    j["nodes"] = res.mip.nodes_explored;
    j["lp_solves"] = res.mip.lp_solves;
    emit_summary(summary, j);
  });
}

ots_status ots_evaluate(const ots_network* net, const ots_solve_options* opts,
                        const int* open_lines, int open_count, const char* solution_path,
                        char** summary) {
  return wrap([&] {
    require(net, "network");
    if (open_count < 0) throw ots::InvalidArgument("open_count must be >= 0");
    if (open_count > 0) require(open_lines, "open_lines");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance inst = make_instance(net, cfg);
    ots::Topology topo =
        ots::Topology::from_lines(std::vector<int>(open_lines, open_lines + open_count));
    ots::check_topology(inst, topo);
    ots::DispatchSolution d = ots::evaluate_topology(inst, topo);
    emit_solution(solution_path, d, topo, net->net->base_mva, cfg);
    emit_summary(summary, dispatch_summary("evaluate", topo, d, net->net->base_mva, cfg));
  });
}

/* ------------------------------------------------------------- heuristics */

ots_status ots_training_load(const char* path, ots_training** out) {
  return wrap([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<ots_training>();
    handle->set = ots::load_training_set(path);
    *out = handle.release();
  });
}

void ots_training_free(ots_training* train) { delete train; }

ots_status ots_training_info_json(const ots_training* train, char** out) {
  return wrap([&] {
    require(train, "training set");
    require(out, "out");
    int errors = 0;
    for (const auto& e : train->set.entries)
      if (!e.error.empty()) ++errors;
    ordered_json j;
    j["network_fingerprint"] = train->set.network_fingerprint;
    if (train->set.cardinality)
      j["cardinality"] = *train->set.cardinality;
    else
      j["cardinality"] = nullptr;
    j["entries"] = train->set.entries.size();
    j["errors"] = errors;
    *out = dup_string(j.dump());
  });
}

ots_status ots_knn(const ots_network* net, const ots_training* train,
                   const ots_solve_options* opts, int k, const char* norm,
                   const char* solution_path, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(train, "training set");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance inst = make_instance(net, cfg);
    ots::KnnConfig knn{k, norm_from(norm)};
    ots::HeuristicResult res = ots::knn_heuristic(inst, train->set, knn, cfg.workers);
    emit_solution(solution_path, res.dispatch, res.topology, net->net->base_mva, cfg);
    ordered_json j = dispatch_summary(res.method, res.topology, res.dispatch,
                                      net->net->base_mva, cfg);
    j["candidates"] = res.candidate_count;
    j["wall_seconds"] = cfg.suppress_timing ? 0.0 : res.wall_seconds;
    emit_summary(summary, j);
  });
}

ots_status ots_greedy(const ots_network* net, const ots_solve_options* opts,
                      const char* solution_path, char** summary) {
  return wrap([&] {
    require(net, "network");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance inst = make_instance(net, cfg);
    ots::HeuristicResult res = ots::greedy_local_search(inst, cfg.workers);
    emit_solution(solution_path, res.dispatch, res.topology, net->net->base_mva, cfg);
    ordered_json j = dispatch_summary(res.method, res.topology, res.dispatch,
                                      net->net->base_mva, cfg);
    j["candidates"] = res.candidate_count;
    j["wall_seconds"] = cfg.suppress_timing ? 0.0 : res.wall_seconds;
    emit_summary(summary, j);
  });
}

/* -------------------------------------------------------------- instances */

void ots_generation_spec_init(ots_generation_spec* spec) {
  if (!spec) return;
  spec->count = 300;
  spec->test_count = 30;
  spec->seed = 0;
  spec->demand_low = 0.9;
  spec->demand_high = 1.1;
  spec->cost_low = 0.95;
  spec->cost_high = 1.05;
}

ots_status ots_generate_file(const ots_network* net, const ots_generation_spec* spec,
                             const ots_solve_options* opts, const char* path, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(spec, "generation spec");
    require(path, "path");
    SolveConfig cfg = make_config(opts);
    ots::GenerationSpec gs = make_spec(spec);
    std::vector<ots::DcotsInstance> all =
        ots::generate_instances(net->net, gs, cfg.cardinality, cfg.infeasibility_cost);
    ots::SplitIndices split = ots::split_train_test(gs.count, gs);

    ordered_json doc;
    doc["network_fingerprint"] = net->fingerprint;
    doc["seed"] = gs.seed;
    doc["count"] = gs.count;
    doc["test_count"] = gs.test_count;
    doc["demand_band"] = {gs.demand_band[0], gs.demand_band[1]};
    doc["cost_band"] = {gs.cost_band[0], gs.cost_band[1]};
    if (cfg.cardinality)
      doc["cardinality"] = *cfg.cardinality;
    else
      doc["cardinality"] = nullptr;
    ordered_json split_json;
    split_json["train"] = split.train;
    split_json["test"] = split.test;
    doc["split"] = split_json;
    ordered_json scenarios = ordered_json::array();
    for (const auto& inst : all) {
      ordered_json s;
      s["demand_pu"] = inst.demand_pu;
      s["gen_cost"] = inst.gen_cost;
      scenarios.push_back(std::move(s));
    }
    doc["instances"] = scenarios;
    write_text_file(path, doc.dump(2) + "\n");

    ordered_json j;
    j["count"] = gs.count;
    j["train"] = split.train.size();
    j["test"] = split.test.size();
    j["path"] = path;
    emit_summary(summary, j);
  });
}

ots_status ots_train_file(const ots_network* net, const ots_generation_spec* spec, ots_side side,
                          const ots_solve_options* opts, const char* path, int resume,
                          ots_progress_fn progress, void* user, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(spec, "generation spec");
    require(path, "path");
    SolveConfig cfg = make_config(opts);
    ots::GenerationSpec gs = make_spec(spec);
    std::vector<ots::DcotsInstance> insts = side_instances(net, gs, side, cfg);
    if (insts.empty()) throw ots::InvalidArgument("no scenarios on the requested split side");

    ots::TrainOptions topts;
    topts.rel_gap = cfg.rel_gap;
    topts.time_limit_seconds = cfg.time_limit;
    topts.workers = cfg.workers;
    topts.suppress_timing = cfg.suppress_timing;

    ots::TrainProgress cb;
    if (progress) cb = [progress, user](int done, int total) { progress(done, total, user); };
    ots::TrainingSet set = ots::train_to_file(insts, path, topts, resume != 0, cb);

    int errors = 0;
    for (const auto& e : set.entries)
      if (!e.error.empty()) ++errors;
    ordered_json j;
    j["instances"] = set.entries.size();
    j["errors"] = errors;
    j["path"] = path;
    emit_summary(summary, j);
  });
}

/* --------------------------------------------------------------- analysis */

ots_status ots_analyze_census(const ots_training* train, const char* csv_path,
                              const char* json_path, char** summary) {
  return wrap([&] {
    require(train, "training set");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    ots::TopologyCensus census = ots::topology_census(train->set);
    ots::write_census(census, csv_path, json_path);
    ordered_json j;
    j["usable_entries"] = census.usable_entries;
    j["unique_topologies"] = census.unique_topologies.size();
    emit_summary(summary, j);
  });
}

ots_status ots_analyze_crosseval(const ots_network* net, const ots_generation_spec* spec,
                                 const ots_training* train, const ots_solve_options* opts,
                                 const char* csv_path, const char* json_path, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(spec, "generation spec");
    require(train, "training set");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    SolveConfig cfg = make_config(opts);
    ots::GenerationSpec gs = make_spec(spec);
    std::vector<ots::DcotsInstance> tests = side_instances(net, gs, OTS_SIDE_TEST, cfg);
    if (tests.empty()) throw ots::InvalidArgument("split has no test scenarios");

    std::vector<double> exact;
    exact.reserve(tests.size());
    for (const auto& t : tests)
      exact.push_back(ots::solve_dcots(t, cfg.rel_gap, cfg.time_limit).dispatch.total_objective);
    ots::GapMatrix matrix = ots::cross_evaluate(train->set, tests, &exact, cfg.workers);
    ots::write_gap_matrix(matrix, csv_path, json_path);

    // Best reachable gap per test over the trained topologies.
    double mean_best = 0.0, max_best = 0.0;
    for (int c = 0; c < matrix.num_tests; ++c) {
      double best = std::numeric_limits<double>::infinity();
      for (size_t r = 0; r < matrix.topologies.size(); ++r)
        best = std::min(best, matrix.gap_at(static_cast<int>(r), c));
      mean_best += best;
      max_best = std::max(max_best, best);
    }
    mean_best /= matrix.num_tests;
    ordered_json j;
    j["topologies"] = matrix.topologies.size();
    j["tests"] = matrix.num_tests;
    j["mean_best_gap"] = mean_best;
    j["max_best_gap"] = max_best;
    emit_summary(summary, j);
  });
}

ots_status ots_analyze_cardinal(const ots_network* net, const ots_generation_spec* spec,
                                const ots_training* train, const ots_solve_options* opts,
                                double epsilon, const char* norm, const char* csv_path,
                                const char* json_path, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(spec, "generation spec");
    require(train, "training set");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    SolveConfig cfg = make_config(opts);
    ots::GenerationSpec gs = make_spec(spec);
    std::vector<ots::DcotsInstance> tests = side_instances(net, gs, OTS_SIDE_TEST, cfg);
    if (tests.empty()) throw ots::InvalidArgument("split has no test scenarios");

    ots::GapMatrix matrix = ots::cross_evaluate(train->set, tests, nullptr, cfg.workers);
    ots::CardinalReport report =
        ots::cardinal_distances(train->set, tests, epsilon, matrix, norm_from(norm));
    ots::write_cardinal(report, csv_path, json_path);

    double mean_rank = 0.0;
    int within = 0;
    for (size_t i = 0; i < report.rank_of_best.size(); ++i) {
      mean_rank += report.rank_of_best[i];
      if (report.rank_within_eps[i] >= 0) ++within;
    }
    if (!report.rank_of_best.empty()) mean_rank /= static_cast<double>(report.rank_of_best.size());
    ordered_json j;
    j["tests"] = report.rank_of_best.size();
    j["epsilon"] = report.epsilon;
    j["mean_rank_of_best"] = mean_rank;
    j["within_epsilon"] = within;
    emit_summary(summary, j);
  });
}

ots_status ots_analyze_loocv(const ots_network* net, const ots_generation_spec* spec,
                             const ots_training* train, const ots_solve_options* opts, int k,
                             const char* norm, const char* csv_path, const char* json_path,
                             char** summary) {
  return wrap([&] {
    require(net, "network");
    require(spec, "generation spec");
    require(train, "training set");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    SolveConfig cfg = make_config(opts);
    ots::GenerationSpec gs = make_spec(spec);
    std::vector<ots::DcotsInstance> insts = side_instances(net, gs, OTS_SIDE_TRAIN, cfg);
    ots::KnnConfig knn{k, norm_from(norm)};
    ots::LoocvReport report = ots::loocv(insts, train->set, knn, cfg.workers);
    ots::write_loocv(report, csv_path, json_path);
    ordered_json j;
    j["count"] = report.indexes.size();
    j["mean_gap"] = report.mean_gap;
    j["min_gap"] = report.min_gap;
    j["max_gap"] = report.max_gap;
    emit_summary(summary, j);
  });
}

ots_status ots_analyze_classes(const ots_network* net, const ots_solve_options* opts,
                               double delta_pu, const char* csv_path, const char* json_path,
                               char** summary) {
  return wrap([&] {
    require(net, "network");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance base = make_instance(net, cfg);
    ots::BusClasses classes =
        ots::bus_classes(base, delta_pu, cfg.rel_gap, cfg.time_limit, cfg.workers);
    ots::write_classes(classes, *net->net, csv_path, json_path);
    int classified = 0;
    for (int c : classes.class_of_bus)
      if (c >= 0) ++classified;
    ordered_json j;
    j["classes"] = classes.representative.size();
    j["classified_buses"] = classified;
    j["near_pairs"] = classes.near_pairs.size();
    emit_summary(summary, j);
  });
}

ots_status ots_analyze_stability(const ots_network* net, const ots_solve_options* opts,
                                 int directions, const double* radii, int radius_count,
                                 uint64_t seed, const char* csv_path, const char* json_path,
                                 char** summary) {
  return wrap([&] {
    require(net, "network");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    if (radius_count < 1) throw ots::InvalidArgument("need at least one radius");
    require(radii, "radii");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance inst = make_instance(net, cfg);
    std::vector<double> schedule(radii, radii + radius_count);
    ots::StabilityReport report =
        ots::stability_probe(inst, directions, schedule, seed, 100000, cfg.workers);
    ots::write_stability(report, csv_path, json_path);
    ordered_json j;
    j["unique_optimum"] = report.unique_optimum;
    j["stable_radius"] = report.stable_radius;
    j["directions"] = report.directions;
    emit_summary(summary, j);
  });
}

ots_status ots_analyze_congestion(const ots_network* net, const ots_solve_options* opts,
                                  const char* csv_path, const char* json_path, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    SolveConfig cfg = make_config(opts);
    ots::DcotsInstance inst = make_instance(net, cfg);
    ots::CongestionStats stats =
        ots::congestion_stats(inst, std::nullopt, cfg.rel_gap, cfg.time_limit);
    ots::DispatchSolution closed = ots::evaluate_topology(inst, ots::Topology{});
    ots::write_congestion(stats, closed, *net->net, csv_path, json_path);
    ordered_json j;
    j["binding_fraction"] = stats.binding_fraction;
    j["all_closed_objective"] = stats.all_closed_objective;
    j["best_objective"] = stats.best_objective;
    j["switching_gain"] = stats.switching_gain;
    emit_summary(summary, j);
  });
}

ots_status ots_benchmark(const ots_network* net, const ots_generation_spec* spec,
                         const ots_training* train, const ots_solve_options* opts, int k,
                         const char* norm, const char* out_dir, char** summary) {
  return wrap([&] {
    require(net, "network");
    require(spec, "generation spec");
    require(out_dir, "out_dir");
    SolveConfig cfg = make_config(opts);
    ots::GenerationSpec gs = make_spec(spec);
    std::vector<ots::DcotsInstance> tests = side_instances(net, gs, OTS_SIDE_TEST, cfg);
    if (tests.empty()) throw ots::InvalidArgument("split has no test scenarios");

    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    std::ofstream csv(dir / "benchmark.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw ots::IoError("cannot write file: " + (dir / "benchmark.csv").string());
    csv << "test,method,open_lines,objective,gap,feasible,seconds,evaluations\n";

    struct Agg {
      double gap_sum = 0.0, gap_max = 0.0, seconds_sum = 0.0, eval_sum = 0.0;
      int n = 0;
    };
    Agg greedy_agg, knn_agg;
    double exact_sum = 0.0, exact_seconds = 0.0;
    std::vector<ots::DispatchSolution> heuristic_dispatches;

    auto emit_row = [&](int test, const std::string& method, const ots::Topology& topo,
                        double objective, double gap, bool feasible, double seconds,
                        long evaluations) {
      csv << test << "," << method << "," << join_ids(topo.open_lines) << ","
          << fmt_double(objective) << "," << fmt_double(gap) << "," << (feasible ? 1 : 0) << ","
          << fmt_double(cfg.suppress_timing ? 0.0 : seconds) << "," << evaluations << "\n";
    };

    for (size_t t = 0; t < tests.size(); ++t) {
      const ots::DcotsInstance& inst = tests[t];
      ots::DcotsResult exact = ots::solve_dcots(inst, cfg.rel_gap, cfg.time_limit);
      double best = exact.dispatch.total_objective;
      emit_row(static_cast<int>(t), "exact", exact.topology, best, 0.0, exact.dispatch.feasible,
               exact.mip.wall_seconds, exact.mip.lp_solves);
      exact_sum += best;
      exact_seconds += exact.mip.wall_seconds;

      ots::HeuristicResult greedy = ots::greedy_local_search(inst, cfg.workers);
      double ggap = ots::relative_gap(greedy.dispatch.total_objective, best);
      emit_row(static_cast<int>(t), "greedy", greedy.topology, greedy.dispatch.total_objective,
               ggap, greedy.dispatch.feasible, greedy.wall_seconds, greedy.candidate_count);
      greedy_agg.gap_sum += ggap;
      greedy_agg.gap_max = std::max(greedy_agg.gap_max, ggap);
      greedy_agg.seconds_sum += greedy.wall_seconds;
      greedy_agg.eval_sum += greedy.candidate_count;
      ++greedy_agg.n;
      heuristic_dispatches.push_back(greedy.dispatch);

      if (train) {
        ots::KnnConfig knn{k, norm_from(norm)};
        ots::HeuristicResult near = ots::knn_heuristic(inst, train->set, knn, cfg.workers);
        double kgap = ots::relative_gap(near.dispatch.total_objective, best);
        emit_row(static_cast<int>(t), "knn", near.topology, near.dispatch.total_objective, kgap,
                 near.dispatch.feasible, near.wall_seconds, near.candidate_count);
        knn_agg.gap_sum += kgap;
        knn_agg.gap_max = std::max(knn_agg.gap_max, kgap);
        knn_agg.seconds_sum += near.wall_seconds;
        knn_agg.eval_sum += near.candidate_count;
        ++knn_agg.n;
        heuristic_dispatches.push_back(near.dispatch);
      }
    }
    csv.flush();
    if (!csv) throw ots::IoError("failed while writing benchmark.csv");
    csv.close();

    auto method_json = [&](const Agg& a) {
      ordered_json m;
      m["mean_gap"] = a.n ? a.gap_sum / a.n : 0.0;
      m["max_gap"] = a.gap_max;
      m["mean_seconds"] = (a.n && !cfg.suppress_timing) ? a.seconds_sum / a.n : 0.0;
      m["mean_evaluations"] = a.n ? a.eval_sum / a.n : 0.0;
      return m;
    };
    ordered_json doc;
    doc["tests"] = tests.size();
    ordered_json exact_json;
    exact_json["mean_objective"] = exact_sum / static_cast<double>(tests.size());
    exact_json["mean_seconds"] =
        cfg.suppress_timing ? 0.0 : exact_seconds / static_cast<double>(tests.size());
    ordered_json methods;
    methods["exact"] = exact_json;
    methods["greedy"] = method_json(greedy_agg);
    if (train) methods["knn"] = method_json(knn_agg);
    doc["methods"] = methods;
    write_text_file((dir / "benchmark.json").string(), doc.dump(2) + "\n");

    ots::FeasibilitySummary feas =
        ots::feasibility_report(heuristic_dispatches, net->net->base_mva);
    ots::write_feasibility(heuristic_dispatches, feas, net->net->base_mva,
                           (dir / "feasibility.csv").string(),
                           (dir / "feasibility.json").string());

    ordered_json j;
    j["tests"] = tests.size();
    j["greedy_mean_gap"] = greedy_agg.n ? greedy_agg.gap_sum / greedy_agg.n : 0.0;
    if (train) j["knn_mean_gap"] = knn_agg.n ? knn_agg.gap_sum / knn_agg.n : 0.0;
    j["out_dir"] = out_dir;
    emit_summary(summary, j);
  });
}

} /* extern "C" */
