// Command line front end. Talks to the toolkit exclusively through the C
// API in otswitch.h; everything here is argument plumbing and reporting.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "otswitch.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Exit code 1: the command line or config file is wrong.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit code 2: input data or a solver failed.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OtsString {
  char* p = nullptr;
  ~OtsString() { ots_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct NetworkHandle {
  ots_network* p = nullptr;
  NetworkHandle() = default;
  NetworkHandle(const NetworkHandle&) = delete;
  NetworkHandle& operator=(const NetworkHandle&) = delete;
  NetworkHandle(NetworkHandle&& other) noexcept : p(other.p) { other.p = nullptr; }
  NetworkHandle& operator=(NetworkHandle&& other) noexcept {
    if (this != &other) {
      ots_network_free(p);
      p = other.p;
      other.p = nullptr;
    }
    return *this;
  }
  ~NetworkHandle() { ots_network_free(p); }
};

struct TrainingHandle {
  ots_training* p = nullptr;
  TrainingHandle() = default;
  TrainingHandle(const TrainingHandle&) = delete;
  TrainingHandle& operator=(const TrainingHandle&) = delete;
  TrainingHandle(TrainingHandle&& other) noexcept : p(other.p) { other.p = nullptr; }
  TrainingHandle& operator=(TrainingHandle&& other) noexcept {
    if (this != &other) {
      ots_training_free(p);
      p = other.p;
      other.p = nullptr;
    }
    return *this;
  }
  ~TrainingHandle() { ots_training_free(p); }
};

void check(ots_status status) {
  if (status == OTS_OK) return;
  if (status == OTS_ERR_ARGUMENT) throw UsageError(ots_last_error());
  throw DataError(ots_last_error());
}

int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Effective run configuration; config file values are overridden by flags.
struct Config {
  int count = 300;
  int test_count = 30;
  std::uint64_t seed = 0;
  double demand_band[2] = {0.9, 1.1};
  double cost_band[2] = {0.95, 1.05};
  int cardinality = -1;  // -1 means unlimited
  double rel_gap = 0.01;
  double time_limit_s = 0.0;  // 0 means no limit
  int workers = default_workers();
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double to_double(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + what + ": '" + text + "'");
  }
}

long long to_int(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid integer for " + what + ": '" + text + "'");
  }
}

// "0.9,1.1" or "[0.9, 1.1]"
void parse_band(const std::string& text, double band[2], const std::string& what) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  size_t comma = s.find(',');
  if (comma == std::string::npos) throw UsageError(what + " needs two comma-separated numbers");
  band[0] = to_double(trim(s.substr(0, comma)), what);
  band[1] = to_double(trim(s.substr(comma + 1)), what);
}

int parse_cardinality(const std::string& text) {
  std::string s = trim(text);
  if (s == "none") return -1;
  long long v = to_int(s, "--cardinality");
  if (v < 0) throw UsageError("--cardinality must be a non-negative integer or 'none'");
  return static_cast<int>(v);
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(item, what));
  }
  if (out.empty()) throw UsageError(what + " needs at least one number");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::string s = trim(text);
  if (s == "none" || s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<int>(to_int(item, what)));
  }
  return out;
}

// key = value lines; '#' and '%' start comments.
void load_config_file(const std::string& path, Config& cfg, std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find_first_of("#%");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "count") {
      cfg.count = static_cast<int>(to_int(value, key));
    } else if (key == "test_count") {
      cfg.test_count = static_cast<int>(to_int(value, key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(value, key));
    } else if (key == "demand_band") {
      parse_band(value, cfg.demand_band, key);
    } else if (key == "cost_band") {
      parse_band(value, cfg.cost_band, key);
    } else if (key == "cardinality") {
      cfg.cardinality = parse_cardinality(value);
    } else if (key == "rel_gap") {
      cfg.rel_gap = to_double(value, key);
    } else if (key == "time_limit_s") {
      cfg.time_limit_s = to_double(value, key);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(to_int(value, key));
    } else {
      throw UsageError(path + ":" + std::to_string(line_no) + ": unknown config key '" + key +
                       "'");
    }
    given.insert(key);
  }
}

// Flags shared by most subcommands. Option pointers let the resolver see
// which ones were actually given.
struct CommonFlags {
  std::string case_pos;
  std::string case_flag;
  std::string config_path;
  std::string cardinality_text;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double gap = 0.01;
  double time_limit = 0.0;
  int workers = 0;
  int count = 300;
  int test_count = 30;
  bool no_timing = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* gap_opt = nullptr;
  CLI::Option* time_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* card_opt = nullptr;
  CLI::Option* count_opt = nullptr;
  CLI::Option* test_count_opt = nullptr;
};

void attach_common(CLI::App* cmd, CommonFlags& f, bool with_positional_case) {
  if (with_positional_case)
    cmd->add_option("CASE", f.case_pos, "MATPOWER case file");
  cmd->add_option("--case", f.case_flag, "MATPOWER case file");
  cmd->add_option("--config", f.config_path, "config file with key = value lines");
  f.seed_opt = cmd->add_option("--seed", f.seed, "random seed");
  f.card_opt = cmd->add_option("--cardinality", f.cardinality_text,
                               "max lines to open, or 'none' for unlimited");
  f.gap_opt = cmd->add_option("--gap", f.gap, "relative optimality gap");
  f.time_opt = cmd->add_option("--time-limit", f.time_limit, "solve time limit in seconds");
  f.workers_opt = cmd->add_option("--workers", f.workers, "worker threads");
  cmd->add_option("--out", f.out_dir, "output directory (default '.')");
  cmd->add_flag("--no-timing", f.no_timing, "zero wall-clock fields in data files");
}

void attach_generation(CLI::App* cmd, CommonFlags& f) {
  f.count_opt = cmd->add_option("--count", f.count, "scenarios to sample");
  f.test_count_opt = cmd->add_option("--test-count", f.test_count, "scenarios held out as tests");
}

Config resolve(const CommonFlags& f, std::set<std::string>& given) {
  Config cfg;
  if (!f.config_path.empty()) load_config_file(f.config_path, cfg, given);
  if (f.seed_opt && f.seed_opt->count()) {
    cfg.seed = f.seed;
    given.insert("seed");
  }
  if (f.card_opt && f.card_opt->count()) {
    cfg.cardinality = parse_cardinality(f.cardinality_text);
    given.insert("cardinality");
  }
  if (f.gap_opt && f.gap_opt->count()) {
    cfg.rel_gap = f.gap;
    given.insert("rel_gap");
  }
  if (f.time_opt && f.time_opt->count()) {
    cfg.time_limit_s = f.time_limit;
    given.insert("time_limit_s");
  }
  if (f.workers_opt && f.workers_opt->count()) {
    cfg.workers = f.workers;
    given.insert("workers");
  }
  if (f.count_opt && f.count_opt->count()) {
    cfg.count = f.count;
    given.insert("count");
  }
  if (f.test_count_opt && f.test_count_opt->count()) {
    cfg.test_count = f.test_count;
    given.insert("test_count");
  }
  if (cfg.workers < 1) throw UsageError("--workers must be at least 1");
  if (cfg.rel_gap < 0) throw UsageError("--gap must be non-negative");
  if (cfg.time_limit_s < 0) throw UsageError("--time-limit must be non-negative");
  return cfg;
}

std::string case_path(const CommonFlags& f, bool required = true) {
  if (!f.case_pos.empty() && !f.case_flag.empty() && f.case_pos != f.case_flag)
    throw UsageError("case file given twice: '" + f.case_pos + "' and '" + f.case_flag + "'");
  std::string path = f.case_pos.empty() ? f.case_flag : f.case_pos;
  if (path.empty() && required) throw UsageError("missing case file (positional or --case)");
  return path;
}

ots_solve_options solve_options(const Config& cfg, const CommonFlags& f) {
  ots_solve_options opts;
  ots_solve_options_init(&opts);
  opts.cardinality = cfg.cardinality;
  opts.rel_gap = cfg.rel_gap;
  opts.time_limit_seconds = cfg.time_limit_s;
  opts.workers = cfg.workers;
  opts.suppress_timing = f.no_timing ? 1 : 0;
  return opts;
}

ots_generation_spec generation_spec(const Config& cfg) {
  ots_generation_spec spec;
  ots_generation_spec_init(&spec);
  spec.count = cfg.count;
  spec.test_count = cfg.test_count;
  spec.seed = cfg.seed;
  spec.demand_low = cfg.demand_band[0];
  spec.demand_high = cfg.demand_band[1];
  spec.cost_low = cfg.cost_band[0];
  spec.cost_high = cfg.cost_band[1];
  return spec;
}

NetworkHandle load_network(const std::string& path, bool linearize_cost = false) {
  ots_parse_options popts;
  ots_parse_options_init(&popts);
  popts.linearize_cost = linearize_cost ? 1 : 0;
  NetworkHandle net;
  check(ots_network_parse_file(path.c_str(), &popts, &net.p));
  return net;
}

TrainingHandle load_training(const std::string& path) {
  TrainingHandle train;
  check(ots_training_load(path.c_str(), &train.p));
  return train;
}

std::string out_file(const CommonFlags& f, const std::string& name) {
  fs::create_directories(f.out_dir);
  return (fs::path(f.out_dir) / name).string();
}

ordered_json config_json(const Config& cfg) {
  ordered_json j;
  j["count"] = cfg.count;
  j["test_count"] = cfg.test_count;
  j["seed"] = cfg.seed;
  j["demand_band"] = {cfg.demand_band[0], cfg.demand_band[1]};
  j["cost_band"] = {cfg.cost_band[0], cfg.cost_band[1]};
  if (cfg.cardinality >= 0)
    j["cardinality"] = cfg.cardinality;
  else
    j["cardinality"] = nullptr;
  j["rel_gap"] = cfg.rel_gap;
  j["time_limit_s"] = cfg.time_limit_s;
  j["workers"] = cfg.workers;
  return j;
}

struct RunContext {
  std::string argv_line;
  std::chrono::steady_clock::time_point start;
};

RunContext g_run;

void write_manifest(const CommonFlags& f, const std::string& command_id, const Config& cfg,
                    const ots_network* net, const std::vector<std::string>& outputs) {
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_run.start).count();
  ordered_json j;
  j["command"] = g_run.argv_line;
  j["version"] = ots_version();
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  if (net) {
    OtsString fp;
    check(ots_network_fingerprint(net, &fp.p));
    j["network_fingerprint"] = fp.str();
  } else {
    j["network_fingerprint"] = nullptr;
  }
  j["wall_seconds"] = wall;
  j["outputs"] = outputs;
  std::string path = out_file(f, "manifest-" + command_id + ".json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

ordered_json parse_summary(const OtsString& s) {
  return ordered_json::parse(s.str());
}

std::string lines_text(const ordered_json& open_lines) {
  std::string s = "[";
  for (size_t i = 0; i < open_lines.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(open_lines[i].get<int>());
  }
  return s + "]";
}

void print_dispatch_summary(const ordered_json& j) {
  std::cout << "open lines " << lines_text(j["open_lines"])
            << ", objective " << j["total_objective"].dump()
            << ", generation cost " << j["generation_cost"].dump();
  if (j["load_shed_mw"].get<double>() > 0)
    std::cout << ", load shed " << j["load_shed_mw"].dump() << " MW";
  std::cout << "\n";
}

/* ---------------------------------------------------------------- actions */

struct ParseFlags {
  CommonFlags common;
  bool validate = false;
  bool linearize = false;
};

int run_parse(const ParseFlags& f) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  NetworkHandle net = load_network(case_path(f.common), f.linearize);

  int buses = 0, gens = 0, lines = 0;
  check(ots_network_counts(net.p, &buses, &gens, &lines));
  std::cout << buses << " buses, " << gens << " generators, " << lines << " lines\n";

  OtsString info;
  check(ots_network_info_json(net.p, &info.p));
  ordered_json info_json = ordered_json::parse(info.str());
  for (const auto& w : info_json["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";

  bool valid = true;
  if (f.validate) {
    OtsString diag;
    check(ots_network_validate_json(net.p, &diag.p));
    ordered_json d = ordered_json::parse(diag.str());
    for (const auto& e : d["errors"]) std::cerr << "error: " << e.get<std::string>() << "\n";
    for (const auto& w : d["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    valid = d["ok"].get<bool>();
    std::cout << "validation: " << (valid ? "ok" : "failed") << "\n";
  }

  std::string info_path = out_file(f.common, "network_info.json");
  {
    std::ofstream out(info_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + info_path);
    out << info_json.dump(2) << "\n";
  }
  write_manifest(f.common, "parse", cfg, net.p, {info_path});
  if (!valid) throw DataError("network validation failed");
  return 0;
}

struct SolveFlags {
  CommonFlags common;
  std::string dump_lp;
  std::string open_lines_text;
  CLI::Option* open_opt = nullptr;
};

int run_solve(const SolveFlags& f) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  NetworkHandle net = load_network(case_path(f.common));
  ots_solve_options opts = solve_options(cfg, f.common);
  if (!f.dump_lp.empty()) opts.dump_lp_path = f.dump_lp.c_str();

  std::string solution_path = out_file(f.common, "solution.json");
  OtsString summary;
  if (f.open_opt && f.open_opt->count()) {
    std::vector<int> open = parse_int_list(f.open_lines_text, "--open");
    check(ots_evaluate(net.p, &opts, open.data(), static_cast<int>(open.size()),
                       solution_path.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    print_dispatch_summary(j);
  } else {
    check(ots_solve(net.p, &opts, solution_path.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << "status " << j["status"].get<std::string>() << ", gap " << j["mip_gap"].dump()
              << ", nodes " << j["nodes"].dump() << "\n";
    print_dispatch_summary(j);
  }
  std::cout << "wrote " << solution_path << "\n";
  std::vector<std::string> outputs{solution_path};
  if (!f.dump_lp.empty()) outputs.push_back(f.dump_lp);
  write_manifest(f.common, "solve", cfg, net.p, outputs);
  return 0;
}

struct GenerateFlags {
  CommonFlags common;
};

int run_generate(const GenerateFlags& f) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  NetworkHandle net = load_network(case_path(f.common));
  ots_generation_spec spec = generation_spec(cfg);
  ots_solve_options opts = solve_options(cfg, f.common);

  std::string path = out_file(f.common, "instances.json");
  OtsString summary;
  check(ots_generate_file(net.p, &spec, &opts, path.c_str(), &summary.p));
  ordered_json j = parse_summary(summary);
  std::cout << "generated " << j["count"].dump() << " scenarios (train " << j["train"].dump()
            << ", test " << j["test"].dump() << ")\n";
  std::cout << "wrote " << path << "\n";
  write_manifest(f.common, "generate", cfg, net.p, {path});
  return 0;
}

struct TrainFlags {
  CommonFlags common;
  std::string side = "train";
  bool resume = false;
};

void progress_printer(int done, int total, void*) {
  std::cerr << "\rsolved " << done << "/" << total << std::flush;
  if (done == total) std::cerr << "\n";
}

int run_train(const TrainFlags& f) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  NetworkHandle net = load_network(case_path(f.common));
  ots_generation_spec spec = generation_spec(cfg);
  ots_solve_options opts = solve_options(cfg, f.common);

  ots_side side;
  if (f.side == "train")
    side = OTS_SIDE_TRAIN;
  else if (f.side == "test")
    side = OTS_SIDE_TEST;
  else if (f.side == "all")
    side = OTS_SIDE_ALL;
  else
    throw UsageError("--side must be train, test, or all");

  std::string path = out_file(f.common, "training.jsonl");
  OtsString summary;
  check(ots_train_file(net.p, &spec, side, &opts, path.c_str(), f.resume ? 1 : 0,
                       progress_printer, nullptr, &summary.p));
  ordered_json j = parse_summary(summary);
  std::cout << "trained " << j["instances"].dump() << " scenarios (" << j["errors"].dump()
            << " errors)\n";
  std::cout << "wrote " << path << "\n";
  write_manifest(f.common, "train", cfg, net.p, {path});
  return 0;
}

struct HeuristicFlags {
  CommonFlags common;
  std::string train_path;
  int k = 10;
  std::string norm = "euclidean";
};

int run_heuristic(const HeuristicFlags& f, bool knn) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  NetworkHandle net = load_network(case_path(f.common));
  ots_solve_options opts = solve_options(cfg, f.common);

  std::string name = knn ? "knn_solution.json" : "greedy_solution.json";
  std::string solution_path = out_file(f.common, name);
  OtsString summary;
  if (knn) {
    if (f.train_path.empty()) throw UsageError("heuristic knn needs --train");
    TrainingHandle train = load_training(f.train_path);
    check(ots_knn(net.p, train.p, &opts, f.k, f.norm.c_str(), solution_path.c_str(), &summary.p));
  } else {
    check(ots_greedy(net.p, &opts, solution_path.c_str(), &summary.p));
  }
  ordered_json j = parse_summary(summary);
  std::cout << j["method"].get<std::string>() << ": ";
  print_dispatch_summary(j);
  std::cout << "candidates " << j["candidates"].dump() << "\n";
  std::cout << "wrote " << solution_path << "\n";
  write_manifest(f.common, knn ? "heuristic-knn" : "heuristic-greedy", cfg, net.p,
                 {solution_path});
  return 0;
}

struct BenchmarkFlags {
  CommonFlags common;
  std::string train_path;
  int k = 10;
  std::string norm = "euclidean";
};

int run_benchmark(const BenchmarkFlags& f) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  NetworkHandle net = load_network(case_path(f.common));
  ots_generation_spec spec = generation_spec(cfg);
  ots_solve_options opts = solve_options(cfg, f.common);

  TrainingHandle train;
  if (!f.train_path.empty()) train = load_training(f.train_path);
  fs::create_directories(f.common.out_dir);
  OtsString summary;
  check(ots_benchmark(net.p, &spec, train.p, &opts, f.k, f.norm.c_str(),
                      f.common.out_dir.c_str(), &summary.p));
  ordered_json j = parse_summary(summary);
  std::cout << "benchmarked " << j["tests"].dump() << " test scenarios\n";
  std::cout << "greedy mean gap " << j["greedy_mean_gap"].dump();
  if (j.contains("knn_mean_gap")) std::cout << ", knn mean gap " << j["knn_mean_gap"].dump();
  std::cout << "\n";
  std::vector<std::string> outputs;
  for (const char* name : {"benchmark.csv", "benchmark.json", "feasibility.csv",
                           "feasibility.json"})
    outputs.push_back((fs::path(f.common.out_dir) / name).string());
  for (const auto& o : outputs) std::cout << "wrote " << o << "\n";
  write_manifest(f.common, "benchmark", cfg, net.p, outputs);
  return 0;
}

struct AnalyzeFlags {
  CommonFlags common;
  std::string train_path;
  int k = 10;
  std::string norm = "euclidean";
  double epsilon = 0.01;
  double delta = 1.0;
  int directions = 16;
  std::string radii_text = "0.01,0.02,0.05,0.1";
};

int run_analyze(const AnalyzeFlags& f, const std::string& what) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);

  auto paths = [&](const char* stem) {
    return std::pair<std::string, std::string>(out_file(f.common, std::string(stem) + ".csv"),
                                               out_file(f.common, std::string(stem) + ".json"));
  };

  OtsString summary;
  std::vector<std::string> outputs;
  NetworkHandle net;
  TrainingHandle train;

  if (what == "census") {
    if (f.train_path.empty()) throw UsageError("analyze census needs --train");
    train = load_training(f.train_path);
    auto [csv, json] = paths("census");
    check(ots_analyze_census(train.p, csv.c_str(), json.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << j["unique_topologies"].dump() << " distinct topologies over "
              << j["usable_entries"].dump() << " usable entries\n";
    outputs = {csv, json};
  } else if (what == "crosseval") {
    if (f.train_path.empty()) throw UsageError("analyze crosseval needs --train");
    net = load_network(case_path(f.common));
    train = load_training(f.train_path);
    ots_generation_spec spec = generation_spec(cfg);
    ots_solve_options opts = solve_options(cfg, f.common);
    auto [csv, json] = paths("gap_matrix");
    check(ots_analyze_crosseval(net.p, &spec, train.p, &opts, csv.c_str(), json.c_str(),
                                &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << j["topologies"].dump() << " topologies x " << j["tests"].dump()
              << " tests, mean best gap " << j["mean_best_gap"].dump() << "\n";
    outputs = {csv, json};
  } else if (what == "cardinal") {
    if (f.train_path.empty()) throw UsageError("analyze cardinal needs --train");
    net = load_network(case_path(f.common));
    train = load_training(f.train_path);
    ots_generation_spec spec = generation_spec(cfg);
    ots_solve_options opts = solve_options(cfg, f.common);
    auto [csv, json] = paths("cardinal");
    check(ots_analyze_cardinal(net.p, &spec, train.p, &opts, f.epsilon, f.norm.c_str(),
                               csv.c_str(), json.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << "mean rank of best " << j["mean_rank_of_best"].dump() << ", within epsilon "
              << j["within_epsilon"].dump() << "/" << j["tests"].dump() << "\n";
    outputs = {csv, json};
  } else if (what == "loocv") {
    if (f.train_path.empty()) throw UsageError("analyze loocv needs --train");
    net = load_network(case_path(f.common));
    train = load_training(f.train_path);
    ots_generation_spec spec = generation_spec(cfg);
    ots_solve_options opts = solve_options(cfg, f.common);
    auto [csv, json] = paths("loocv");
    check(ots_analyze_loocv(net.p, &spec, train.p, &opts, f.k, f.norm.c_str(), csv.c_str(),
                            json.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << "loocv over " << j["count"].dump() << " instances: mean gap "
              << j["mean_gap"].dump() << ", max gap " << j["max_gap"].dump() << "\n";
    outputs = {csv, json};
  } else if (what == "classes") {
    net = load_network(case_path(f.common));
    // Bus grouping defaults to a small opening budget instead of "unlimited".
    if (!given.count("cardinality")) cfg.cardinality = 5;
    ots_solve_options opts = solve_options(cfg, f.common);
    opts.cardinality = cfg.cardinality;
    auto [csv, json] = paths("classes");
    check(ots_analyze_classes(net.p, &opts, f.delta, csv.c_str(), json.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << j["classes"].dump() << " bus classes, " << j["classified_buses"].dump()
              << " buses classified, " << j["near_pairs"].dump() << " near pairs\n";
    outputs = {csv, json};
  } else if (what == "stability") {
    net = load_network(case_path(f.common));
    ots_solve_options opts = solve_options(cfg, f.common);
    std::vector<double> radii = parse_double_list(f.radii_text, "--radii");
    auto [csv, json] = paths("stability");
    check(ots_analyze_stability(net.p, &opts, f.directions, radii.data(),
                                static_cast<int>(radii.size()), cfg.seed, csv.c_str(),
                                json.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << "unique optimum: " << j["unique_optimum"].dump() << ", stable radius "
              << j["stable_radius"].dump() << "\n";
    outputs = {csv, json};
  } else if (what == "congestion") {
    net = load_network(case_path(f.common));
    ots_solve_options opts = solve_options(cfg, f.common);
    auto [csv, json] = paths("congestion");
    check(ots_analyze_congestion(net.p, &opts, csv.c_str(), json.c_str(), &summary.p));
    ordered_json j = parse_summary(summary);
    std::cout << "binding fraction " << j["binding_fraction"].dump() << ", switching gain "
              << j["switching_gain"].dump() << "\n";
    outputs = {csv, json};
  } else {
    throw UsageError("unknown analysis '" + what + "'");
  }

  for (const auto& o : outputs) std::cout << "wrote " << o << "\n";
  write_manifest(f.common, "analyze-" + what, cfg, net.p, outputs);
  return 0;
}

struct ReportFlags {
  CommonFlags common;
};

int run_report(const ReportFlags& f) {
  std::set<std::string> given;
  Config cfg = resolve(f.common, given);
  fs::path dir(f.common.out_dir);
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + f.common.out_dir);

  // Stable artifact order so identical inputs give identical report bytes.
  const std::vector<std::string> json_artifacts = {
      "network_info.json", "benchmark.json",  "feasibility.json", "census.json",
      "gap_matrix.json",   "cardinal.json",   "loocv.json",       "classes.json",
      "stability.json",    "congestion.json", "solution.json",    "knn_solution.json",
      "greedy_solution.json"};

  ordered_json report;
  report["version"] = ots_version();
  ordered_json found = ordered_json::object();
  for (const auto& name : json_artifacts) {
    fs::path p = dir / name;
    if (!fs::exists(p)) continue;
    std::ifstream in(p, std::ios::binary);
    if (!in) continue;
    try {
      found[name] = ordered_json::parse(in);
    } catch (const std::exception&) {
      found[name] = "unparseable";
    }
  }
  fs::path training = dir / "training.jsonl";
  if (fs::exists(training)) {
    std::ifstream in(training, std::ios::binary);
    std::string header;
    int entries = 0, errors = 0;
    if (std::getline(in, header)) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++entries;
        if (line.find("\"error\"") != std::string::npos) ++errors;
      }
      ordered_json t;
      try {
        t["header"] = ordered_json::parse(header);
      } catch (const std::exception&) {
        t["header"] = "unparseable";
      }
      t["entries"] = entries;
      t["errors"] = errors;
      found["training.jsonl"] = t;
    }
  }
  report["artifacts"] = found;

  std::string path = out_file(f.common, "report.json");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << report.dump(2) << "\n";
  }
  std::cout << "collected " << found.size() << " artifacts\n";
  for (const auto& [name, value] : found.items()) std::cout << "  " << name << "\n";
  std::cout << "wrote " << path << "\n";
  write_manifest(f.common, "report", cfg, nullptr, {path});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_run.start = std::chrono::steady_clock::now();
  {
    std::ostringstream cmd;
    cmd << "otswitch";
    for (int i = 1; i < argc; ++i) cmd << " " << argv[i];
    g_run.argv_line = cmd.str();
  }

  CLI::App app{"DC optimal transmission switching toolkit"};
  app.set_version_flag("--version", ots_version());
  app.require_subcommand(1);

  std::function<int()> action;

  auto* parse_cmd = app.add_subcommand("parse", "parse a case file and report its size");
  auto parse_flags = std::make_shared<ParseFlags>();
  attach_common(parse_cmd, parse_flags->common, true);
  parse_cmd->add_flag("--validate", parse_flags->validate, "run structural checks");
  parse_cmd->add_flag("--linearize-cost", parse_flags->linearize,
                      "keep the linear term of quadratic costs");
  parse_cmd->callback([&action, parse_flags] { action = [parse_flags] { return run_parse(*parse_flags); }; });

  auto* solve_cmd = app.add_subcommand("solve", "solve the switching problem exactly");
  auto solve_flags = std::make_shared<SolveFlags>();
  attach_common(solve_cmd, solve_flags->common, true);
  solve_cmd->add_option("--dump-lp", solve_flags->dump_lp, "write the model in LP text format");
  solve_flags->open_opt = solve_cmd->add_option(
      "--open", solve_flags->open_lines_text,
      "evaluate this fixed set of open lines (comma separated) instead of optimizing");
  solve_cmd->callback([&action, solve_flags] { action = [solve_flags] { return run_solve(*solve_flags); }; });

  auto* generate_cmd = app.add_subcommand("generate", "sample demand/cost scenarios");
  auto generate_flags = std::make_shared<GenerateFlags>();
  attach_common(generate_cmd, generate_flags->common, true);
  attach_generation(generate_cmd, generate_flags->common);
  generate_cmd->callback(
      [&action, generate_flags] { action = [generate_flags] { return run_generate(*generate_flags); }; });

  auto* train_cmd = app.add_subcommand("train", "solve scenarios into a training file");
  auto train_flags = std::make_shared<TrainFlags>();
  attach_common(train_cmd, train_flags->common, true);
  attach_generation(train_cmd, train_flags->common);
  train_cmd->add_option("--side", train_flags->side, "split side to solve: train, test, or all");
  train_cmd->add_flag("--resume", train_flags->resume, "continue an interrupted training file");
  train_cmd->callback([&action, train_flags] { action = [train_flags] { return run_train(*train_flags); }; });

  auto* heur_cmd = app.add_subcommand("heuristic", "fast approximate switching");
  heur_cmd->require_subcommand(1);
  auto knn_flags = std::make_shared<HeuristicFlags>();
  auto* knn_cmd = heur_cmd->add_subcommand("knn", "re-use the topology of near training scenarios");
  attach_common(knn_cmd, knn_flags->common, true);
  knn_cmd->add_option("--train", knn_flags->train_path, "training file")->required();
  knn_cmd->add_option("--k", knn_flags->k, "neighbors to price");
  knn_cmd->add_option("--norm", knn_flags->norm, "euclidean, manhattan, infinity, or an exponent");
  knn_cmd->callback([&action, knn_flags] { action = [knn_flags] { return run_heuristic(*knn_flags, true); }; });
  auto greedy_flags = std::make_shared<HeuristicFlags>();
  auto* greedy_cmd = heur_cmd->add_subcommand("greedy", "open lines one at a time while it helps");
  attach_common(greedy_cmd, greedy_flags->common, true);
  greedy_cmd->callback(
      [&action, greedy_flags] { action = [greedy_flags] { return run_heuristic(*greedy_flags, false); }; });

  auto* bench_cmd = app.add_subcommand("benchmark", "compare heuristics against exact solves");
  auto bench_flags = std::make_shared<BenchmarkFlags>();
  attach_common(bench_cmd, bench_flags->common, true);
  attach_generation(bench_cmd, bench_flags->common);
  bench_cmd->add_option("--train", bench_flags->train_path, "training file (enables knn)");
  bench_cmd->add_option("--k", bench_flags->k, "neighbors to price");
  bench_cmd->add_option("--norm", bench_flags->norm, "distance norm");
  bench_cmd->callback([&action, bench_flags] { action = [bench_flags] { return run_benchmark(*bench_flags); }; });

  auto* analyze_cmd = app.add_subcommand("analyze", "study a trained model or a network");
  analyze_cmd->require_subcommand(1);
  struct AnalyzeSub {
    const char* name;
    const char* help;
  };
  const std::vector<AnalyzeSub> subs = {
      {"census", "distinct topologies in a training file"},
      {"crosseval", "every trained topology on every test scenario"},
      {"cardinal", "distance rank needed to reach good topologies"},
      {"loocv", "leave-one-out gap of the nearest-neighbor rule"},
      {"classes", "group buses by the topology a demand bump selects"},
      {"stability", "how far demand can move before the optimum changes"},
      {"congestion", "line loading and the gain from switching"},
  };
  for (const auto& sub : subs) {
    auto flags = std::make_shared<AnalyzeFlags>();
    auto* cmd = analyze_cmd->add_subcommand(sub.name, sub.help);
    attach_common(cmd, flags->common, true);
    attach_generation(cmd, flags->common);
    cmd->add_option("--train", flags->train_path, "training file");
    cmd->add_option("--k", flags->k, "neighbors to price");
    cmd->add_option("--norm", flags->norm, "distance norm");
    cmd->add_option("--epsilon", flags->epsilon, "relative gap counted as good enough");
    cmd->add_option("--delta", flags->delta, "demand bump in per-unit");
    cmd->add_option("--directions", flags->directions, "random perturbation directions");
    cmd->add_option("--radii", flags->radii_text, "perturbation radii, comma separated");
    std::string name = sub.name;
    cmd->callback(
        [&action, flags, name] { action = [flags, name] { return run_analyze(*flags, name); }; });
  }

  auto* report_cmd = app.add_subcommand("report", "bundle the artifacts of an output directory");
  auto report_flags = std::make_shared<ReportFlags>();
  attach_common(report_cmd, report_flags->common, false);
  report_cmd->callback(
      [&action, report_flags] { action = [report_flags] { return run_report(*report_flags); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    return action ? action() : 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
