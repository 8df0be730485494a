#include "reference_dcopf.hpp"

#include <cmath>
#include <limits>

namespace testsupport {

ReferenceDispatch reference_dispatch(const ots::Network& net, const std::vector<double>& demand,
                                     const std::vector<double>& cost,
                                     const std::set<int>& open_lines, double penalty) {
  const double pi = 3.14159265358979323846;
  int ng = net.num_generators();
  int nl = net.num_lines();
  int nb = net.num_buses();

  // Variables: p_g, f_l, theta_b, shed_b, spill_b.
  DenseLp lp;
  lp.n = ng + nl + 3 * nb;
  lp.c.assign(lp.n, 0.0);
  lp.lo.assign(lp.n, 0.0);
  lp.hi.assign(lp.n, 0.0);
  auto P = [&](int g) { return g; };
  auto F = [&](int l) { return ng + l; };
  auto TH = [&](int b) { return ng + nl + b; };
  auto SH = [&](int b) { return ng + nl + nb + b; };
  auto SP = [&](int b) { return ng + nl + 2 * nb + b; };

  for (int g = 0; g < ng; ++g) {
    lp.c[P(g)] = cost[g];
    lp.lo[P(g)] = net.generators[g].p_min_pu;
    lp.hi[P(g)] = net.generators[g].p_max_pu;
  }
  for (int l = 0; l < nl; ++l) {
    bool open = open_lines.count(l) > 0;
    lp.lo[F(l)] = open ? 0.0 : -net.lines[l].flow_limit_pu;
    lp.hi[F(l)] = open ? 0.0 : net.lines[l].flow_limit_pu;
  }
  for (int b = 0; b < nb; ++b) {
    bool ref = b == net.reference_bus();
    lp.lo[TH(b)] = ref ? 0.0 : -pi;
    lp.hi[TH(b)] = ref ? 0.0 : pi;
    lp.c[SH(b)] = penalty;
    lp.hi[SH(b)] = std::numeric_limits<double>::infinity();
    lp.c[SP(b)] = penalty;
    lp.hi[SP(b)] = std::numeric_limits<double>::infinity();
  }

  auto add_row = [&](std::vector<double> a, int rel, double b) {
    lp.a.push_back(std::move(a));
    lp.rel.push_back(rel);
    lp.b.push_back(b);
  };

  // Closed lines: f = B (theta_from - theta_to), |theta_from - theta_to| <= pi/6.
  for (int l = 0; l < nl; ++l) {
    if (open_lines.count(l)) continue;
    int o = net.bus_index(net.lines[l].from_bus);
    int d = net.bus_index(net.lines[l].to_bus);
    double B = net.lines[l].susceptance_pu;
    std::vector<double> ohm(lp.n, 0.0);
    ohm[F(l)] = 1.0;
    ohm[TH(o)] = -B;
    ohm[TH(d)] = B;
    add_row(ohm, 0, 0.0);

    std::vector<double> win(lp.n, 0.0);
    win[TH(o)] = 1.0;
    win[TH(d)] = -1.0;
    add_row(win, -1, pi / 6.0);
    win[TH(o)] = -1.0;
    win[TH(d)] = 1.0;
    add_row(win, -1, pi / 6.0);
  }

  // Power balance at every bus: inflow + generation + shed = demand + outflow + spill.
  for (int b = 0; b < nb; ++b) {
    std::vector<double> bal(lp.n, 0.0);
    for (int g = 0; g < ng; ++g)
      if (net.bus_index(net.generators[g].bus) == b) bal[P(g)] = 1.0;
    for (int l = 0; l < nl; ++l) {
      if (net.bus_index(net.lines[l].to_bus) == b) bal[F(l)] += 1.0;
      if (net.bus_index(net.lines[l].from_bus) == b) bal[F(l)] -= 1.0;
    }
    bal[SH(b)] = 1.0;
    bal[SP(b)] = -1.0;
    add_row(bal, 0, demand[b]);
  }

  DenseResult res = tableau_solve(lp);
  ReferenceDispatch out;
  if (res.status != DenseResult::kOptimal) return out;
  out.solved = true;
  out.objective = res.objective;
  out.p.assign(res.x.begin() + P(0), res.x.begin() + P(0) + ng);
  out.f.assign(res.x.begin() + F(0), res.x.begin() + F(0) + nl);
  out.theta.assign(res.x.begin() + TH(0), res.x.begin() + TH(0) + nb);
  out.shed.assign(res.x.begin() + SH(0), res.x.begin() + SH(0) + nb);
  out.spill.assign(res.x.begin() + SP(0), res.x.begin() + SP(0) + nb);
  return out;
}

}  // namespace testsupport
