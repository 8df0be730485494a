#include <cmath>
#include <memory>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "ots/dcots.hpp"
#include "ots/matpower.hpp"
#include "reference_dcopf.hpp"

using namespace ots;

namespace {

std::shared_ptr<const Network> load(const char* name) {
  return std::make_shared<Network>(parse_case_file(std::string(OTS_DATA_DIR) + "/" + name));
}

double eval(const DcotsInstance& inst, std::vector<int> open) {
  return evaluate_topology(inst, Topology::from_lines(std::move(open))).total_objective;
}

}  // namespace

TEST_CASE("two bus dispatch meets demand over one line") {
  auto net = load("case2.m");
  DcotsInstance inst = nominal_instance(net);

  DispatchSolution closed = evaluate_topology(inst, Topology{});
  CHECK(closed.total_objective == doctest::Approx(25.0));
  CHECK(closed.generation_cost == doctest::Approx(25.0));
  CHECK(closed.penalty_cost == doctest::Approx(0.0));
  CHECK(closed.dispatch_pu[0] == doctest::Approx(0.5));
  CHECK(closed.flow_pu[0] == doctest::Approx(0.5));
  CHECK(closed.feasible);
  CHECK(closed.angle_rad[net->reference_bus()] == 0.0);
  // th2 = th1 - f/B = -0.05
  CHECK(closed.angle_rad[1] == doctest::Approx(-0.05));

  DispatchSolution cut = evaluate_topology(inst, Topology::from_lines({0}));
  CHECK(cut.total_objective == doctest::Approx(500000.0));
  CHECK(cut.penalty_cost == doctest::Approx(500000.0));
  CHECK(cut.generation_cost == doctest::Approx(0.0));
  CHECK(cut.load_shed_pu[1] == doctest::Approx(0.5));
  CHECK(cut.flow_pu[0] == 0.0);
  CHECK_FALSE(cut.feasible);
}

TEST_CASE("three bus topologies price exactly as derived by hand") {
  auto net = load("case3.m");
  DcotsInstance inst = nominal_instance(net);

  CHECK(eval(inst, {}) == doctest::Approx(28.0));
  CHECK(eval(inst, {0}) == doctest::Approx(10.0));
  CHECK(eval(inst, {1}) == doctest::Approx(46.0));
  CHECK(eval(inst, {2}) == doctest::Approx(400006.0));
  CHECK(eval(inst, {0, 1}) == doctest::Approx(100.0));
  CHECK(eval(inst, {0, 2}) == doctest::Approx(1000000.0));
  CHECK(eval(inst, {1, 2}) == doctest::Approx(400006.0));
  CHECK(eval(inst, {0, 1, 2}) == doctest::Approx(1000000.0));

  // The congested all-closed dispatch: the cheap unit is held at the limit
  // of the direct line.
  DispatchSolution closed = evaluate_topology(inst, Topology{});
  CHECK(closed.dispatch_pu[0] == doctest::Approx(0.8));
  CHECK(closed.dispatch_pu[1] == doctest::Approx(0.2));
  CHECK(std::abs(closed.flow_pu[0]) == doctest::Approx(0.6));
}

TEST_CASE("fixed topology dispatch agrees with the reference model") {
  auto net = load("case3.m");
  DcotsInstance inst = nominal_instance(net);

  std::vector<std::vector<int>> topologies = {{},    {0},    {1},    {2},
                                              {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  for (const auto& open : topologies) {
    DispatchSolution mine = evaluate_topology(inst, Topology::from_lines(open));
    testsupport::ReferenceDispatch ref = testsupport::reference_dispatch(
        *net, inst.demand_pu, inst.gen_cost, std::set<int>(open.begin(), open.end()),
        inst.infeasibility_cost);
    INFO("open set size ", open.size());
    REQUIRE(ref.solved);
    CHECK(mine.total_objective ==
          doctest::Approx(ref.objective).epsilon(1e-7));
  }
}

TEST_CASE("switching model has the expected shape") {
  auto net = load("case3.m");
  DcotsInstance inst = nominal_instance(net, 1);
  MipProblem mip = build_dcots_mip(inst);

  // p(2) f(3) theta(3) u(3) v(3) y(3)
  CHECK(mip.lp.num_vars == 17);
  // 6 rows per line, 3 balances, 1 cardinality row
  CHECK(mip.lp.num_rows() == 22);
  CHECK(mip.integer_vars.size() == 3);

  // Reference bus angle is pinned, the others swing.
  int theta0 = 2 + 3 + 0;
  CHECK(mip.lp.lower[theta0] == 0.0);
  CHECK(mip.lp.upper[theta0] == 0.0);
  CHECK(mip.lp.lower[theta0 + 1] < 0.0);

  SUBCASE("without a cardinality limit the count row disappears") {
    DcotsInstance free = nominal_instance(net);
    CHECK(build_dcots_mip(free).lp.num_rows() == 21);
  }
  SUBCASE("non-switchable lines get their binary pinned to one") {
    Network mod = *net;
    mod.lines[1].switchable = false;
    mod.finalize();
    DcotsInstance fixed = nominal_instance(std::make_shared<Network>(mod), 1);
    MipProblem pinned = build_dcots_mip(fixed);
    int y1 = 2 + 3 + 3 * 3 + 1;
    CHECK(pinned.lp.lower[y1] == 1.0);
    CHECK(pinned.lp.upper[y1] == 1.0);
  }
}

TEST_CASE("branch and bound finds the unique best switching plan") {
  auto net = load("case3.m");

  SUBCASE("opening one line") {
    DcotsResult res = solve_dcots(nominal_instance(net, 1));
    CHECK(res.topology.open_lines == std::vector<int>{0});
    CHECK(res.dispatch.total_objective == doctest::Approx(10.0));
    CHECK(res.mip.status == MipStatus::Optimal);
    CHECK(res.mip.gap == doctest::Approx(0.0));
  }
  SUBCASE("no opening allowed") {
    DcotsResult res = solve_dcots(nominal_instance(net, 0));
    CHECK(res.topology.open_lines.empty());
    CHECK(res.dispatch.total_objective == doctest::Approx(28.0));
  }
  SUBCASE("unlimited openings keep the same best plan") {
    DcotsResult res = solve_dcots(nominal_instance(net));
    CHECK(res.dispatch.total_objective == doctest::Approx(10.0));
  }
  SUBCASE("a zero time limit returns the warm topology") {
    DcotsResult res = solve_dcots(nominal_instance(net, 1), 0.0, 1e-12);
    CHECK(res.mip.status == MipStatus::TimeLimit);
    CHECK(res.topology.open_lines.empty());
    CHECK(res.dispatch.total_objective == doctest::Approx(28.0));
  }
}

TEST_CASE("brute force agrees with branch and bound") {
  auto net = load("case3.m");
  for (int k : {0, 1, 2, 3}) {
    DcotsInstance inst = nominal_instance(net, k);
    DcotsResult exact = brute_force_dcots(inst);
    DcotsResult bb = solve_dcots(inst);
    INFO("cardinality ", k);
    CHECK(exact.dispatch.total_objective ==
          doctest::Approx(bb.dispatch.total_objective).epsilon(1e-7));
    CHECK(exact.topology.open_lines == bb.topology.open_lines);
  }
}

TEST_CASE("topology enumeration is cardinality first, then lexicographic") {
  auto net = load("case3.m");
  DcotsInstance inst = nominal_instance(net, 2);
  std::vector<std::vector<int>> seen;
  for_each_topology(inst, 100, [&](const Topology& t) { seen.push_back(t.open_lines); });
  std::vector<std::vector<int>> want = {{}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}};
  CHECK(seen == want);

  CHECK_THROWS_AS(for_each_topology(inst, 3, [](const Topology&) {}), InvalidArgument);

  SUBCASE("non-switchable lines drop out of the pool") {
    Network mod = *net;
    mod.lines[0].switchable = false;
    mod.finalize();
    DcotsInstance fixed = nominal_instance(std::make_shared<Network>(mod), 1);
    std::vector<std::vector<int>> rest;
    for_each_topology(fixed, 100, [&](const Topology& t) { rest.push_back(t.open_lines); });
    CHECK(rest == std::vector<std::vector<int>>{{}, {1}, {2}});
  }
}

TEST_CASE("topology and instance guards reject bad input") {
  auto net = load("case3.m");
  DcotsInstance inst = nominal_instance(net, 1);

  CHECK_THROWS_AS(check_topology(inst, Topology{{7}}), InvalidArgument);
  CHECK_THROWS_AS(check_topology(inst, Topology{{0, 1}}), InvalidArgument);  // over the limit
  CHECK_THROWS_AS(check_topology(inst, Topology{{1, 0}}), InvalidArgument);  // unsorted
  CHECK_NOTHROW(check_topology(inst, Topology::from_lines({1, 1, 1})));      // normalized first

  SUBCASE("demand vector size") {
    inst.demand_pu.pop_back();
    CHECK_THROWS_AS(check_instance(inst), InvalidArgument);
  }
  SUBCASE("negative cost") {
    inst.gen_cost[0] = -1.0;
    CHECK_THROWS_AS(check_instance(inst), InvalidArgument);
  }
  SUBCASE("bad penalty") {
    inst.infeasibility_cost = 0.0;
    CHECK_THROWS_AS(check_instance(inst), InvalidArgument);
  }
  SUBCASE("weak penalty only warns") {
    inst.infeasibility_cost = 50.0;
    auto diags = check_instance(inst);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].severity == Diagnostic::Severity::Warning);
  }
  SUBCASE("negative cardinality") {
    inst.cardinality_k = -1;
    CHECK_THROWS_AS(check_instance(inst), InvalidArgument);
  }
  SUBCASE("unsolvable network") {
    Network broken = *net;
    broken.buses[0].kind = BusKind::PQ;  // no reference bus left
    broken.finalize();
    DcotsInstance bad = nominal_instance(std::make_shared<Network>(broken));
    CHECK_THROWS_AS(check_instance(bad), ValidationError);
  }
}

TEST_CASE("relative gap guards its reference value") {
  CHECK(relative_gap(11.0, 10.0) == doctest::Approx(0.1));
  CHECK(relative_gap(10.0, 10.0) == 0.0);
  CHECK_THROWS_AS(relative_gap(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(relative_gap(1.0, -2.0), InvalidArgument);
}

TEST_CASE("congestion statistics summarize the switching gain") {
  auto net = load("case3.m");
  DcotsInstance inst = nominal_instance(net, 1);
  CongestionStats stats = congestion_stats(inst, 10.0);
  CHECK(stats.all_closed_objective == doctest::Approx(28.0));
  CHECK(stats.best_objective == doctest::Approx(10.0));
  CHECK(stats.switching_gain == doctest::Approx(1.8));
  CHECK(stats.binding_fraction == doctest::Approx(1.0 / 3.0));

  CongestionStats solved = congestion_stats(inst);
  CHECK(solved.best_objective == doctest::Approx(10.0));
}

TEST_CASE("dispatch serialization is fixed order, megawatts, and reproducible") {
  auto net = load("case2.m");
  DcotsInstance inst = nominal_instance(net);
  Topology cut = Topology::from_lines({0});
  DispatchSolution d = evaluate_topology(inst, cut);

  std::string text = dispatch_to_json(d, cut, net->base_mva, /*suppress_timing=*/true);
  auto j = nlohmann::json::parse(text);
  CHECK(j["open_lines"] == std::vector<int>{0});
  CHECK(j["generation_cost"].get<double>() == doctest::Approx(0.0));
  CHECK(j["penalty_cost"].get<double>() == doctest::Approx(500000.0));
  CHECK(j["total_objective"].get<double>() == doctest::Approx(500000.0));
  CHECK(j["load_shed_mw"].get<double>() == doctest::Approx(50.0));
  CHECK(j["over_generation_mw"].get<double>() == doctest::Approx(0.0));
  CHECK(j["solve_seconds"].get<double>() == 0.0);

  // Field order is part of the format.
  CHECK(text.find("open_lines") < text.find("generation_cost"));
  CHECK(text.find("generation_cost") < text.find("penalty_cost"));
  CHECK(text.find("penalty_cost") < text.find("total_objective"));
  CHECK(text.find("total_objective") < text.find("load_shed_mw"));
  CHECK(text.find("load_shed_mw") < text.find("over_generation_mw"));
  CHECK(text.find("over_generation_mw") < text.find("solve_seconds"));
  CHECK(text.back() == '\n');

  // Identical bytes on a second serialization with timing suppressed.
  DispatchSolution again = evaluate_topology(inst, cut);
  CHECK(dispatch_to_json(again, cut, net->base_mva, true) == text);

  // Without suppression the measured time shows up.
  std::string timed = dispatch_to_json(d, cut, net->base_mva, false);
  auto jt = nlohmann::json::parse(timed);
  CHECK(jt["solve_seconds"].get<double>() == d.solve_seconds);
}
