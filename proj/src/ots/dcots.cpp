#include "dcots.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

#include "json.hpp"

namespace ots {

namespace {

constexpr double kAngleWindow = std::numbers::pi / 6.0;
constexpr double kBigAngle = 2.0 * std::numbers::pi;

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DcotsInstance nominal_instance(std::shared_ptr<const Network> net,
                               std::optional<int> cardinality_k, double infeasibility_cost) {
  if (!net) throw InvalidArgument("nominal_instance needs a network");
  DcotsInstance inst;
  inst.network = std::move(net);
  inst.demand_pu.reserve(inst.network->num_buses());
  for (const auto& b : inst.network->buses) inst.demand_pu.push_back(b.demand_pu);
  inst.gen_cost.reserve(inst.network->num_generators());
  for (const auto& g : inst.network->generators) inst.gen_cost.push_back(g.cost_per_pu);
  inst.cardinality_k = cardinality_k;
  inst.infeasibility_cost = infeasibility_cost;
  return inst;
}

std::vector<Diagnostic> check_instance(const DcotsInstance& inst) {
  if (!inst.network) throw InvalidArgument("instance has no network");
  const Network& net = *inst.network;

  std::vector<Diagnostic> diags = validate(net);
  for (const auto& d : diags)
    if (d.severity == Diagnostic::Severity::Error)
      throw ValidationError("network is not solvable: " + d.message);

  if (static_cast<int>(inst.demand_pu.size()) != net.num_buses())
    throw InvalidArgument("instance demand vector does not match the bus count");
  if (static_cast<int>(inst.gen_cost.size()) != net.num_generators())
    throw InvalidArgument("instance cost vector does not match the generator count");
  for (double d : inst.demand_pu)
    if (!std::isfinite(d)) throw InvalidArgument("instance demand is not finite");
  double max_cost = 0.0;
  for (double c : inst.gen_cost) {
    if (!std::isfinite(c) || c < 0.0)
      throw InvalidArgument("instance generator costs must be finite and non-negative");
    max_cost = std::max(max_cost, c);
  }
  if (inst.cardinality_k && *inst.cardinality_k < 0)
    throw InvalidArgument("cardinality limit must be non-negative");
  if (!std::isfinite(inst.infeasibility_cost) || inst.infeasibility_cost <= 0.0)
    throw InvalidArgument("infeasibility cost must be positive and finite");
  if (inst.infeasibility_cost <= max_cost)
    diags.push_back({Diagnostic::Severity::Warning,
                     "infeasibility cost does not dominate generator costs; shedding may be "
                     "preferred over real dispatch"});
  return diags;
}

Topology Topology::from_lines(std::vector<int> lines) {
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return Topology{std::move(lines)};
}

bool Topology::is_open(int line_id) const {
  return std::binary_search(open_lines.begin(), open_lines.end(), line_id);
}

void check_topology(const DcotsInstance& inst, const Topology& topo) {
  const Network& net = *inst.network;
  if (!std::is_sorted(topo.open_lines.begin(), topo.open_lines.end()) ||
      std::adjacent_find(topo.open_lines.begin(), topo.open_lines.end()) !=
          topo.open_lines.end())
    throw InvalidArgument("topology line set must be sorted and duplicate-free");
  for (int id : topo.open_lines) {
    if (id < 0 || id >= net.num_lines())
      throw InvalidArgument("topology opens unknown line " + std::to_string(id));
    if (!net.lines[id].switchable)
      throw InvalidArgument("topology opens non-switchable line " + std::to_string(id));
  }
  if (inst.cardinality_k && topo.open_count() > *inst.cardinality_k)
    throw InvalidArgument("topology opens more lines than the cardinality limit allows");
}

namespace {

// Shared variable layout of the switching model and its fixed-topology LP:
// [p | f | theta | u | v] and, for the full model, [y] appended.
struct VarLayout {
  int ng, nl, nb;
  int p(int g) const { return g; }
  int f(int l) const { return ng + l; }
  int theta(int b) const { return ng + nl + b; }
  int u(int b) const { return ng + nl + nb + b; }
  int v(int b) const { return ng + nl + 2 * nb + b; }
  int y(int l) const { return ng + nl + 3 * nb + l; }
};

void add_core_variables(LinearProgram& lp, const DcotsInstance& inst) {
  const Network& net = *inst.network;
  for (const auto& g : net.generators)
    lp.add_variable(g.p_min_pu, g.p_max_pu, inst.gen_cost[g.id], "p" + std::to_string(g.id));
  for (const auto& l : net.lines)
    lp.add_variable(-l.flow_limit_pu, l.flow_limit_pu, 0.0, "f" + std::to_string(l.id));
  int ref = net.reference_bus();
  for (int b = 0; b < net.num_buses(); ++b) {
    double lo = b == ref ? 0.0 : -std::numbers::pi;
    double hi = b == ref ? 0.0 : std::numbers::pi;
    lp.add_variable(lo, hi, 0.0, "th" + std::to_string(b));
  }
  for (int b = 0; b < net.num_buses(); ++b)
    lp.add_variable(0.0, kInf, inst.infeasibility_cost, "u" + std::to_string(b));
  for (int b = 0; b < net.num_buses(); ++b)
    lp.add_variable(0.0, kInf, inst.infeasibility_cost, "v" + std::to_string(b));
}

void add_balance_rows(LinearProgram& lp, const DcotsInstance& inst, const VarLayout& v) {
  const Network& net = *inst.network;
  for (int b = 0; b < net.num_buses(); ++b) {
    std::vector<std::pair<int, double>> terms;
    for (int g : net.generators_at(b)) terms.push_back({v.p(g), 1.0});
    for (int l : net.lines_to(b)) terms.push_back({v.f(l), 1.0});
    for (int l : net.lines_from(b)) terms.push_back({v.f(l), -1.0});
    terms.push_back({v.u(b), 1.0});
    terms.push_back({v.v(b), -1.0});
    lp.add_row(Relation::Equal, inst.demand_pu[b], std::move(terms));
  }
}

}  // namespace

MipProblem build_dcots_mip(const DcotsInstance& inst) {
  check_instance(inst);
  const Network& net = *inst.network;
  VarLayout v{net.num_generators(), net.num_lines(), net.num_buses()};

  MipProblem mip;
  LinearProgram& lp = mip.lp;
  add_core_variables(lp, inst);
  for (const auto& l : net.lines) {
    double lo = l.switchable ? 0.0 : 1.0;
    lp.add_variable(lo, 1.0, 0.0, "y" + std::to_string(l.id));
    mip.integer_vars.push_back(v.y(l.id));
  }

  for (const auto& l : net.lines) {
    int o = net.bus_index(l.from_bus);
    int d = net.bus_index(l.to_bus);
    double big = kBigAngle * l.susceptance_pu;

    // Flow follows the angle difference whenever the line is closed; with
    // y = 0 both rows relax by one full angle revolution of susceptance.
    lp.add_row(Relation::LessEqual, big,
               {{v.f(l.id), 1.0},
                {v.theta(o), -l.susceptance_pu},
                {v.theta(d), l.susceptance_pu},
                {v.y(l.id), big}});
    lp.add_row(Relation::GreaterEqual, -big,
               {{v.f(l.id), 1.0},
                {v.theta(o), -l.susceptance_pu},
                {v.theta(d), l.susceptance_pu},
                {v.y(l.id), -big}});
    // Open lines carry no flow.
    lp.add_row(Relation::LessEqual, 0.0, {{v.f(l.id), 1.0}, {v.y(l.id), -l.flow_limit_pu}});
    lp.add_row(Relation::GreaterEqual, 0.0, {{v.f(l.id), 1.0}, {v.y(l.id), l.flow_limit_pu}});
    // Angle window applies only across closed lines.
    lp.add_row(Relation::GreaterEqual, -kAngleWindow - kBigAngle,
               {{v.theta(o), 1.0}, {v.theta(d), -1.0}, {v.y(l.id), -kBigAngle}});
    lp.add_row(Relation::LessEqual, kAngleWindow + kBigAngle,
               {{v.theta(o), 1.0}, {v.theta(d), -1.0}, {v.y(l.id), kBigAngle}});
  }

  add_balance_rows(lp, inst, v);

  if (inst.cardinality_k) {
    std::vector<std::pair<int, double>> terms;
    for (const auto& l : net.lines) terms.push_back({v.y(l.id), 1.0});
    lp.add_row(Relation::GreaterEqual, static_cast<double>(net.num_lines() - *inst.cardinality_k),
               std::move(terms));
  }
  return mip;
}

DispatchSolution evaluate_topology(const DcotsInstance& inst, const Topology& topo) {
  check_instance(inst);
  check_topology(inst, topo);
  auto t0 = std::chrono::steady_clock::now();

  const Network& net = *inst.network;
  VarLayout v{net.num_generators(), net.num_lines(), net.num_buses()};

  LinearProgram lp;
  add_core_variables(lp, inst);
  for (int id : topo.open_lines) {
    lp.lower[v.f(id)] = 0.0;
    lp.upper[v.f(id)] = 0.0;
  }

  for (const auto& l : net.lines) {
    if (topo.is_open(l.id)) continue;
    int o = net.bus_index(l.from_bus);
    int d = net.bus_index(l.to_bus);
    lp.add_row(Relation::Equal, 0.0,
               {{v.f(l.id), 1.0},
                {v.theta(o), -l.susceptance_pu},
                {v.theta(d), l.susceptance_pu}});
    lp.add_row(Relation::GreaterEqual, -kAngleWindow, {{v.theta(o), 1.0}, {v.theta(d), -1.0}});
    lp.add_row(Relation::LessEqual, kAngleWindow, {{v.theta(o), 1.0}, {v.theta(d), -1.0}});
  }
  add_balance_rows(lp, inst, v);

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw SolveError("fixed-topology dispatch did not solve; the slack variables should have "
                     "made it feasible");

  DispatchSolution out;
  out.dispatch_pu.assign(sol.primal.begin() + v.p(0), sol.primal.begin() + v.p(0) + v.ng);
  out.flow_pu.assign(sol.primal.begin() + v.f(0), sol.primal.begin() + v.f(0) + v.nl);
  out.angle_rad.assign(sol.primal.begin() + v.theta(0), sol.primal.begin() + v.theta(0) + v.nb);
  out.load_shed_pu.assign(sol.primal.begin() + v.u(0), sol.primal.begin() + v.u(0) + v.nb);
  out.over_gen_pu.assign(sol.primal.begin() + v.v(0), sol.primal.begin() + v.v(0) + v.nb);

  out.generation_cost = 0.0;
  for (int g = 0; g < v.ng; ++g) out.generation_cost += inst.gen_cost[g] * out.dispatch_pu[g];
  double slack = 0.0;
  for (int b = 0; b < v.nb; ++b) slack += out.load_shed_pu[b] + out.over_gen_pu[b];
  out.penalty_cost = inst.infeasibility_cost * slack;
  out.total_objective = out.generation_cost + out.penalty_cost;
  double worst = 0.0;
  for (int b = 0; b < v.nb; ++b)
    worst = std::max({worst, out.load_shed_pu[b], out.over_gen_pu[b]});
  out.feasible = worst <= 1e-6;
  out.solve_seconds = now_seconds(t0);
  return out;
}

DcotsResult solve_dcots(const DcotsInstance& inst, double rel_gap, double time_limit_seconds,
                        const std::optional<Topology>& warm) {
  const Network& net = *inst.network;
  VarLayout v{net.num_generators(), net.num_lines(), net.num_buses()};

  Topology warm_topo = warm.value_or(Topology{});
  DispatchSolution warm_dispatch = evaluate_topology(inst, warm_topo);

  std::vector<double> warm_primal(v.ng + v.nl + 3 * v.nb + v.nl, 0.0);
  std::copy(warm_dispatch.dispatch_pu.begin(), warm_dispatch.dispatch_pu.end(),
            warm_primal.begin() + v.p(0));
  std::copy(warm_dispatch.flow_pu.begin(), warm_dispatch.flow_pu.end(),
            warm_primal.begin() + v.f(0));
  std::copy(warm_dispatch.angle_rad.begin(), warm_dispatch.angle_rad.end(),
            warm_primal.begin() + v.theta(0));
  std::copy(warm_dispatch.load_shed_pu.begin(), warm_dispatch.load_shed_pu.end(),
            warm_primal.begin() + v.u(0));
  std::copy(warm_dispatch.over_gen_pu.begin(), warm_dispatch.over_gen_pu.end(),
            warm_primal.begin() + v.v(0));
  for (const auto& l : net.lines)
    warm_primal[v.y(l.id)] = warm_topo.is_open(l.id) ? 0.0 : 1.0;

  MipProblem mip = build_dcots_mip(inst);
  MipOptions opts;
  opts.rel_gap = rel_gap;
  opts.time_limit_seconds = time_limit_seconds;
  MipResult res = solve_mip(mip, opts, warm_primal);
  if (res.primal.empty()) throw SolveError("switching solve ended without any solution");

  std::vector<int> open;
  for (const auto& l : net.lines)
    if (res.primal[v.y(l.id)] < 0.5) open.push_back(l.id);

  DcotsResult out;
  out.topology = Topology::from_lines(std::move(open));
  out.dispatch = evaluate_topology(inst, out.topology);
  out.mip = std::move(res);
  return out;
}

void for_each_topology(const DcotsInstance& inst, long max_topologies,
                       const std::function<void(const Topology&)>& visit) {
  check_instance(inst);
  std::vector<int> pool = inst.network->switchable_line_ids();
  int n = static_cast<int>(pool.size());
  int k_max = std::min<int>(inst.cardinality_k.value_or(n), n);

  double count = 0.0;
  {
    double c = 1.0;
    for (int j = 0;; ++j) {
      count += c;
      if (count > static_cast<double>(max_topologies))
        throw InvalidArgument("topology enumeration would visit more than " +
                              std::to_string(max_topologies) + " candidates");
      if (j == k_max) break;
      c = c * (n - j) / (j + 1);
    }
  }

  // Cardinality first, then lexicographic over the switchable line pool.
  for (int k = 0; k <= k_max; ++k) {
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      Topology topo;
      topo.open_lines.reserve(k);
      for (int i : pick) topo.open_lines.push_back(pool[i]);
      visit(topo);
      if (k == 0) break;
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
}

DcotsResult brute_force_dcots(const DcotsInstance& inst, long max_topologies) {
  auto t0 = std::chrono::steady_clock::now();
  DcotsResult best;
  bool have = false;
  long visited = 0;

  for_each_topology(inst, max_topologies, [&](const Topology& topo) {
    DispatchSolution d = evaluate_topology(inst, topo);
    ++visited;
    if (!have || d.total_objective <
                     best.dispatch.total_objective -
                         1e-9 * std::max(1.0, std::abs(best.dispatch.total_objective))) {
      best.topology = topo;
      best.dispatch = d;
      have = true;
    }
  });

  best.mip.status = MipStatus::Optimal;
  best.mip.objective_value = best.dispatch.total_objective;
  best.mip.best_bound = best.dispatch.total_objective;
  best.mip.gap = 0.0;
  best.mip.nodes_explored = visited;
  best.mip.lp_solves = visited;
  best.mip.wall_seconds = now_seconds(t0);
  best.mip.primal.clear();
  return best;
}

double relative_gap(double z, double z_best) {
  if (!(z_best > 0.0) || !std::isfinite(z_best))
    throw InvalidArgument("relative gap needs a positive finite reference objective");
  return (z - z_best) / z_best;
}

CongestionStats congestion_stats(const DcotsInstance& inst, std::optional<double> best_known,
                                 double rel_gap, double time_limit_seconds) {
  DispatchSolution closed = evaluate_topology(inst, Topology{});
  const Network& net = *inst.network;
  int binding = 0;
  for (const auto& l : net.lines) {
    double room = l.flow_limit_pu - std::abs(closed.flow_pu[l.id]);
    if (room <= 1e-6 * std::max(1.0, l.flow_limit_pu)) ++binding;
  }

  CongestionStats stats;
  stats.binding_fraction = net.num_lines() > 0 ? static_cast<double>(binding) / net.num_lines()
                                               : 0.0;
  stats.all_closed_objective = closed.total_objective;
  stats.best_objective =
      best_known ? *best_known : solve_dcots(inst, rel_gap, time_limit_seconds).dispatch.total_objective;
  stats.switching_gain = relative_gap(stats.all_closed_objective, stats.best_objective);
  return stats;
}

std::string dispatch_to_json(const DispatchSolution& dispatch, const Topology& topo,
                             double base_mva, bool suppress_timing) {
  double shed = 0.0, over = 0.0;
  for (double u : dispatch.load_shed_pu) shed += u;
  for (double v : dispatch.over_gen_pu) over += v;

  nlohmann::ordered_json j;
  j["open_lines"] = topo.open_lines;
  j["generation_cost"] = dispatch.generation_cost;
  j["penalty_cost"] = dispatch.penalty_cost;
  j["total_objective"] = dispatch.total_objective;
  j["load_shed_mw"] = shed * base_mva;
  j["over_generation_mw"] = over * base_mva;
  j["solve_seconds"] = suppress_timing ? 0.0 : dispatch.solve_seconds;
  return j.dump(2) + "\n";
}

}  // namespace ots
