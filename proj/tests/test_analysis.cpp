#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "doctest.h"
#include "json.hpp"
#include "ots/analysis.hpp"
#include "ots/instances.hpp"
#include "ots/matpower.hpp"

using namespace ots;

namespace {

std::shared_ptr<const Network> load3() {
  static std::shared_ptr<const Network> net = std::make_shared<Network>(
      parse_case_file(std::string(OTS_DATA_DIR) + "/case3.m"));
  return net;
}

TrainingEntry entry(std::vector<double> q, std::vector<int> open, double obj) {
  TrainingEntry e;
  e.q = std::move(q);
  e.topology = Topology::from_lines(std::move(open));
  e.objective = obj;
  return e;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("census counts distinct topologies, not entries") {
  TrainingSet train;
  train.entries.push_back(entry({1}, {0}, 1.0));
  train.entries.push_back(entry({1}, {0}, 1.0));
  train.entries.push_back(entry({1}, {1}, 1.0));
  train.entries.push_back(entry({1}, {0, 2}, 1.0));
  TrainingEntry failed;
  failed.q = {1};
  failed.error = "boom";
  train.entries.push_back(failed);

  TopologyCensus census = topology_census(train);
  CHECK(census.usable_entries == 4);
  REQUIRE(census.unique_topologies.size() == 3);
  CHECK(census.unique_topologies[0].open_lines == std::vector<int>{0});
  CHECK(census.unique_topologies[1].open_lines == std::vector<int>{0, 2});
  CHECK(census.unique_topologies[2].open_lines == std::vector<int>{1});
  CHECK(census.multiplicity == std::vector<int>{2, 1, 1});
  CHECK(census.line_open_count.at(0) == 2);
  CHECK(census.line_open_count.at(1) == 1);
  CHECK(census.line_open_count.at(2) == 1);
  CHECK(census.pair_count.at({0, 2}) == 1);
  CHECK(census.open_frequency(0) == doctest::Approx(2.0 / 3.0));
  CHECK(census.open_frequency(9) == 0.0);
}

TEST_CASE("cross evaluation prices every distinct topology on every test") {
  auto net = load3();
  std::vector<double> q = parameter_vector(nominal_instance(net));

  TrainingSet train;
  train.network_fingerprint = case_fingerprint(*net);
  train.entries.push_back(entry(q, {}, 28.0));
  train.entries.push_back(entry(q, {0}, 10.0));
  train.entries.push_back(entry(q, {1}, 46.0));

  std::vector<DcotsInstance> tests = {nominal_instance(net)};
  GapMatrix m = cross_evaluate(train, tests);

  REQUIRE(m.topologies.size() == 3);
  REQUIRE(m.num_tests == 1);
  // Census order: {}, {0}, {1}
  CHECK(m.obj_at(0, 0) == doctest::Approx(28.0));
  CHECK(m.obj_at(1, 0) == doctest::Approx(10.0));
  CHECK(m.obj_at(2, 0) == doctest::Approx(46.0));
  CHECK(m.best_known[0] == doctest::Approx(10.0));
  CHECK(m.gap_at(0, 0) == doctest::Approx(1.8));
  CHECK(m.gap_at(1, 0) == doctest::Approx(0.0));
  CHECK(m.gap_at(2, 0) == doctest::Approx(3.6));
  CHECK(m.feasible_at(1, 0));

  SUBCASE("an exact objective tightens the reference") {
    std::vector<double> exact = {8.0};
    GapMatrix tighter = cross_evaluate(train, tests, &exact);
    CHECK(tighter.best_known[0] == doctest::Approx(8.0));
    CHECK(tighter.gap_at(1, 0) == doctest::Approx(0.25));
  }
  SUBCASE("test cardinality limits do not restrict the pricing") {
    std::vector<DcotsInstance> capped = {nominal_instance(net, 0)};
    GapMatrix m2 = cross_evaluate(train, capped);
    CHECK(m2.obj_at(1, 0) == doctest::Approx(10.0));
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(cross_evaluate(train, {}), InvalidArgument);
    std::vector<double> short_exact = {1.0, 2.0};
    CHECK_THROWS_AS(cross_evaluate(train, tests, &short_exact), InvalidArgument);
    TrainingSet empty;
    empty.network_fingerprint = train.network_fingerprint;
    CHECK_THROWS_AS(cross_evaluate(empty, tests), InvalidArgument);
  }
}

TEST_CASE("cardinal ranks report how deep the ranking must go") {
  auto net = load3();
  DcotsInstance nominal = nominal_instance(net);
  std::vector<double> q = parameter_vector(nominal);

  // Entry 0 sits exactly on the query but reuses the mediocre topology;
  // entry 1 is farther away and carries the best topology.
  std::vector<double> far = q;
  far[3] *= 2.0;
  TrainingSet train;
  train.network_fingerprint = case_fingerprint(*net);
  train.entries.push_back(entry(q, {}, 28.0));
  train.entries.push_back(entry(far, {0}, 11.0));

  std::vector<DcotsInstance> tests = {nominal};
  GapMatrix m = cross_evaluate(train, tests);

  CardinalReport rep = cardinal_distances(train, tests, 2.0, m);
  REQUIRE(rep.rank_of_best.size() == 1);
  CHECK(rep.rank_of_best[0] == 2);     // the best topology is the second-nearest
  CHECK(rep.rank_within_eps[0] == 1);  // 1.8 <= 2.0 already at rank one

  SUBCASE("a tiny epsilon pushes the epsilon rank to the best") {
    CardinalReport tight = cardinal_distances(train, tests, 1e-6, m);
    CHECK(tight.rank_within_eps[0] == 2);
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(cardinal_distances(train, tests, -1.0, m), InvalidArgument);
    std::vector<DcotsInstance> two = {nominal, nominal};
    CHECK_THROWS_AS(cardinal_distances(train, two, 0.1, m), InvalidArgument);
  }
}

TEST_CASE("leave one out gaps are zero when the neighbors share the optimum") {
  auto net = load3();
  GenerationSpec spec;
  spec.count = 5;
  spec.test_count = 0;
  spec.seed = 29;
  std::vector<DcotsInstance> insts = generate_instances(net, spec, 1);
  TrainOptions topts;
  topts.rel_gap = 0.0;
  TrainingSet train = ::ots::train(insts, topts);

  KnnConfig cfg;
  cfg.k = 4;
  LoocvReport rep = loocv(insts, train, cfg);
  REQUIRE(rep.indexes.size() == 5);
  CHECK(rep.k == 4);
  // Every neighborhood contains the entry topology of the held-out optimum,
  // and re-pricing it reproduces the training objective bit for bit.
  CHECK(rep.min_gap == 0.0);
  CHECK(rep.mean_gap == doctest::Approx(0.0));
  CHECK(rep.max_gap == doctest::Approx(0.0));

  SUBCASE("misaligned inputs are rejected") {
    TrainingSet shuffled = train;
    std::swap(shuffled.entries[0], shuffled.entries[1]);
    CHECK_THROWS_AS(loocv(insts, shuffled, cfg), InvalidArgument);
    TrainingSet shorter = train;
    shorter.entries.pop_back();
    CHECK_THROWS_AS(loocv(insts, shorter, cfg), InvalidArgument);
  }
  SUBCASE("error entries drop out of the statistics") {
    TrainingSet with_error = train;
    with_error.entries[2].error = "failed";
    LoocvReport partial = loocv(insts, with_error, cfg);
    CHECK(partial.indexes.size() == 4);
    for (int idx : partial.indexes) CHECK(idx != 2);
  }
}

TEST_CASE("buses are classed by the topology their extra demand triggers") {
  auto net = load3();
  DcotsInstance base = nominal_instance(net, 1);
  BusClasses classes = bus_classes(base, 0.2, 0.0);

  REQUIRE(classes.class_of_bus.size() == 3);
  for (size_t b = 0; b < 3; ++b) {
    CHECK(classes.class_of_bus[b] >= 0);
    CHECK(classes.bus_errors[b].empty());
  }
  REQUIRE(!classes.members.empty());
  // Members listed under a class all carry that class id.
  for (size_t c = 0; c < classes.members.size(); ++c)
    for (int b : classes.members[c]) CHECK(classes.class_of_bus[b] == static_cast<int>(c));
  // Near pairs really differ by at most one line.
  for (auto [i, j] : classes.near_pairs) {
    std::vector<int> diff;
    std::set_symmetric_difference(
        classes.representative[i].open_lines.begin(), classes.representative[i].open_lines.end(),
        classes.representative[j].open_lines.begin(), classes.representative[j].open_lines.end(),
        std::back_inserter(diff));
    CHECK(diff.size() <= 1);
  }

  CHECK_THROWS_AS(bus_classes(base, 0.0), InvalidArgument);
}

TEST_CASE("aggregated distances still find a usable topology") {
  auto net = load3();
  DcotsInstance inst = nominal_instance(net);
  std::vector<double> q = parameter_vector(inst);

  BusClasses classes = bus_classes(nominal_instance(net, 1), 0.2, 0.0);

  TrainingSet train;
  train.network_fingerprint = case_fingerprint(*net);
  train.entries.push_back(entry(q, {}, 28.0));
  train.entries.push_back(entry(q, {0}, 10.0));

  HeuristicResult res = aggregated_knn(inst, train, classes);
  CHECK(res.method == "knn-aggregated");
  CHECK(res.candidate_count == 2);
  CHECK(res.topology.open_lines == std::vector<int>{0});
  CHECK(res.dispatch.total_objective == doctest::Approx(10.0));

  TrainingSet empty;
  CHECK_THROWS_AS(aggregated_knn(inst, empty, classes), InvalidArgument);
}

TEST_CASE("stability probe finds a positive radius for a clear optimum") {
  auto net = load3();
  DcotsInstance inst = nominal_instance(net, 1);

  StabilityReport rep = stability_probe(inst, 4, {0.01, 0.05}, 1);
  CHECK(rep.unique_optimum);
  CHECK(rep.directions == 4);
  REQUIRE(rep.radii == std::vector<double>{0.01, 0.05});
  CHECK(rep.stable_fraction[0] == doctest::Approx(1.0));
  CHECK(rep.stable_fraction[1] == doctest::Approx(1.0));
  CHECK(rep.stable_radius == 0.05);

  SUBCASE("a tied optimum reports radius zero") {
    DcotsInstance slack = inst;
    for (double& d : slack.demand_pu) d = 0.0;  // every topology costs zero
    StabilityReport tied = stability_probe(slack, 2, {0.01}, 1);
    CHECK_FALSE(tied.unique_optimum);
    CHECK(tied.stable_radius == 0.0);
  }
  SUBCASE("schedule and direction guards") {
    CHECK_THROWS_AS(stability_probe(inst, 0, {0.1}, 1), InvalidArgument);
    CHECK_THROWS_AS(stability_probe(inst, 2, {0.1, 0.1}, 1), InvalidArgument);
    CHECK_THROWS_AS(stability_probe(inst, 2, {-0.1}, 1), InvalidArgument);
  }
  SUBCASE("same seed, same report") {
    StabilityReport again = stability_probe(inst, 4, {0.01, 0.05}, 1);
    CHECK(again.stable_fraction == rep.stable_fraction);
    CHECK(again.stable_radius == rep.stable_radius);
  }
}

TEST_CASE("feasibility summary counts shed and spill events in megawatts") {
  DispatchSolution clean;
  clean.load_shed_pu = {0.0, 0.0};
  clean.over_gen_pu = {0.0, 0.0};
  clean.feasible = true;
  DispatchSolution shedding;
  shedding.load_shed_pu = {0.004, 0.002};
  shedding.over_gen_pu = {0.0, 0.0};
  DispatchSolution spilling;
  spilling.load_shed_pu = {0.0, 0.0};
  spilling.over_gen_pu = {0.01, 0.0};

  FeasibilitySummary sum = feasibility_report({clean, shedding, spilling}, 100.0);
  CHECK(sum.solution_count == 3);
  CHECK(sum.max_shed_mw == doctest::Approx(0.6));
  CHECK(sum.mean_shed_mw == doctest::Approx(0.2));
  CHECK(sum.shed_events == 1);
  CHECK(sum.over_generation_events == 1);

  FeasibilitySummary none = feasibility_report({}, 100.0);
  CHECK(none.solution_count == 0);
  CHECK(none.mean_shed_mw == 0.0);
}

TEST_CASE("analysis files carry a csv table and a json summary") {
  TrainingSet train;
  train.entries.push_back(entry({1}, {0}, 1.0));
  train.entries.push_back(entry({1}, {0, 2}, 1.0));
  TopologyCensus census = topology_census(train);

  TempFile csv("ots_census.csv");
  TempFile json("ots_census.json");
  write_census(census, csv.path, json.path);

  std::string table = slurp(csv.path);
  CHECK(table.rfind("line_id,open_count,open_frequency\n", 0) == 0);
  CHECK(table.find("\n0,2,1\n") != std::string::npos);

  auto j = nlohmann::json::parse(slurp(json.path));
  CHECK(j["usable_entries"] == 2);
  CHECK(j["unique_topologies"] == 2);
  CHECK(j["topologies"][0]["open_lines"] == std::vector<int>{0});
  CHECK(j["pair_counts"][0]["lines"] == std::vector<int>{0, 2});

  SUBCASE("identical inputs give identical bytes") {
    TempFile csv2("ots_census2.csv");
    TempFile json2("ots_census2.json");
    write_census(census, csv2.path, json2.path);
    CHECK(slurp(csv2.path) == table);
    CHECK(slurp(json2.path) == slurp(json.path));
  }
}

TEST_CASE("remaining writers emit the advertised tables") {
  auto net = load3();
  std::vector<double> q = parameter_vector(nominal_instance(net));
  TrainingSet train;
  train.network_fingerprint = case_fingerprint(*net);
  train.entries.push_back(entry(q, {}, 28.0));
  train.entries.push_back(entry(q, {0}, 10.0));
  std::vector<DcotsInstance> tests = {nominal_instance(net)};
  GapMatrix m = cross_evaluate(train, tests);

  TempFile csv("ots_writer.csv");
  TempFile json("ots_writer.json");

  SUBCASE("gap matrix") {
    write_gap_matrix(m, csv.path, json.path);
    std::string table = slurp(csv.path);
    CHECK(table.rfind("topology,test_index,objective,gap,feasible\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 3);  // header + 2 rows
    auto j = nlohmann::json::parse(slurp(json.path));
    CHECK(j["topology_count"] == 2);
    CHECK(j["test_count"] == 1);
    CHECK(j["best_known"][0].get<double>() == doctest::Approx(10.0));
    CHECK(j["min_gap_per_test"][0].get<double>() == doctest::Approx(0.0));
  }
  SUBCASE("cardinal ranks") {
    CardinalReport rep = cardinal_distances(train, tests, 0.5, m);
    write_cardinal(rep, csv.path, json.path);
    CHECK(slurp(csv.path).rfind("test_index,rank_of_best,rank_within_eps\n", 0) == 0);
    auto j = nlohmann::json::parse(slurp(json.path));
    CHECK(j["epsilon"].get<double>() == 0.5);
    CHECK(j["rank_of_best"].size() == 1);
  }
  SUBCASE("loocv") {
    LoocvReport rep;
    rep.k = 3;
    rep.indexes = {0, 2};
    rep.gaps = {0.0, 0.125};
    rep.mean_gap = 0.0625;
    rep.min_gap = 0.0;
    rep.max_gap = 0.125;
    write_loocv(rep, csv.path, json.path);
    std::string table = slurp(csv.path);
    CHECK(table.rfind("instance,gap\n", 0) == 0);
    CHECK(table.find("\n2,0.125\n") != std::string::npos);
    auto j = nlohmann::json::parse(slurp(json.path));
    CHECK(j["mean_gap"].get<double>() == 0.0625);
    CHECK(j["instances"] == 2);
  }
  SUBCASE("classes") {
    BusClasses classes = bus_classes(nominal_instance(net, 1), 0.2, 0.0);
    write_classes(classes, *net, csv.path, json.path);
    std::string table = slurp(csv.path);
    CHECK(table.rfind("bus,class\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 4);
    auto j = nlohmann::json::parse(slurp(json.path));
    CHECK(j["class_count"].get<int>() >= 1);
    CHECK(j["delta_pu"].get<double>() == 0.2);
  }
  SUBCASE("stability") {
    StabilityReport rep = stability_probe(nominal_instance(net, 1), 2, {0.01}, 1);
    write_stability(rep, csv.path, json.path);
    CHECK(slurp(csv.path).rfind("radius,stable_fraction\n", 0) == 0);
    auto j = nlohmann::json::parse(slurp(json.path));
    CHECK(j["unique_optimum"].get<bool>());
    CHECK(j["stable_radius"].get<double>() == 0.01);
  }
  SUBCASE("feasibility") {
    DispatchSolution d = evaluate_topology(nominal_instance(net), Topology{});
    FeasibilitySummary sum = feasibility_report({d}, net->base_mva);
    write_feasibility({d}, sum, net->base_mva, csv.path, json.path);
    CHECK(slurp(csv.path).rfind("solution,shed_mw,over_generation_mw,feasible\n", 0) == 0);
    auto j = nlohmann::json::parse(slurp(json.path));
    CHECK(j["solution_count"] == 1);
    CHECK(j["shed_events"] == 0);
  }
}
