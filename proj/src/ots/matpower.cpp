#include "matpower.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace ots {

namespace {

struct RawRow {
  std::vector<double> values;
  int line = 0;  // 1-based source line of the row start
};

struct RawCase {
  std::string name = "case";
  double base_mva = 0.0;
  bool has_base = false;
  std::vector<RawRow> bus, gen, branch, gencost;
  std::vector<int> fixed_lines;
};

bool parse_number(std::string_view tok, double& out) {
  if (tok == "Inf" || tok == "inf" || tok == "+Inf" || tok == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (tok == "-Inf" || tok == "-inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void parse_matrix_row(std::string_view row_text, int line_no, std::vector<RawRow>& rows) {
  row_text = trim(row_text);
  if (row_text.empty()) return;
  RawRow row;
  row.line = line_no;
  size_t pos = 0;
  while (pos < row_text.size()) {
    while (pos < row_text.size() &&
           (std::isspace(static_cast<unsigned char>(row_text[pos])) || row_text[pos] == ','))
      ++pos;
    if (pos >= row_text.size()) break;
    size_t end = pos;
    while (end < row_text.size() &&
           !std::isspace(static_cast<unsigned char>(row_text[end])) && row_text[end] != ',')
      ++end;
    std::string_view tok = row_text.substr(pos, end - pos);
    double v;
    if (!parse_number(tok, v))
      throw ParseError("expected a number, found '" + std::string(tok) + "'", line_no);
    row.values.push_back(v);
    pos = end;
  }
  if (!row.values.empty()) rows.push_back(std::move(row));
}

RawCase scan_case(const std::string& text) {
  RawCase raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  std::string matrix_field;   // field currently being accumulated
  std::string matrix_buffer;  // text between [ and ]
  int matrix_start_line = 0;

  auto flush_matrix = [&]() {
    std::vector<RawRow>* target = nullptr;
    if (matrix_field == "bus") target = &raw.bus;
    else if (matrix_field == "gen") target = &raw.gen;
    else if (matrix_field == "branch") target = &raw.branch;
    else if (matrix_field == "gencost") target = &raw.gencost;
    if (target) {
      size_t pos = 0;
      int row_line = matrix_start_line;
      std::string_view buf(matrix_buffer);
      while (pos <= buf.size()) {
        size_t cut = buf.find_first_of(";\n", pos);
        std::string_view row =
            cut == std::string_view::npos ? buf.substr(pos) : buf.substr(pos, cut - pos);
        parse_matrix_row(row, row_line, *target);
        if (cut == std::string_view::npos) break;
        if (buf[cut] == '\n') ++row_line;
        pos = cut + 1;
      }
    }
    matrix_field.clear();
    matrix_buffer.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;

    std::string_view sv(line);
    size_t comment = sv.find('%');
    std::string_view code = comment == std::string_view::npos ? sv : sv.substr(0, comment);
    if (comment != std::string_view::npos) {
      std::string_view rest = trim(sv.substr(comment + 1));
      if (rest.rfind("fixed_lines:", 0) == 0) {
        std::istringstream ids(std::string(rest.substr(12)));
        int id;
        while (ids >> id) raw.fixed_lines.push_back(id);
      }
    }

    if (!matrix_field.empty()) {
      size_t close = code.find(']');
      if (close == std::string_view::npos) {
        matrix_buffer += std::string(code);
        matrix_buffer += '\n';
      } else {
        matrix_buffer += std::string(code.substr(0, close));
        flush_matrix();
      }
      continue;
    }

    std::string_view t = trim(code);
    if (t.empty()) continue;

    if (t.rfind("function", 0) == 0) {
      size_t eq = t.find('=');
      if (eq != std::string_view::npos) raw.name = std::string(trim(t.substr(eq + 1)));
      continue;
    }

    if (t.rfind("mpc.", 0) != 0) continue;
    size_t eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected '=' after field name", line_no);
    std::string field(trim(t.substr(4, eq - 4)));
    std::string_view value = trim(t.substr(eq + 1));

    if (field == "dcline" || field == "dclinecost")
      throw UnsupportedError("line " + std::to_string(line_no) + ": DC lines are not supported");

    if (!value.empty() && value.front() == '[') {
      value.remove_prefix(1);
      size_t close = value.find(']');
      matrix_field = field;
      matrix_start_line = line_no;
      if (close == std::string_view::npos) {
        matrix_buffer = std::string(value);
        matrix_buffer += '\n';
      } else {
        matrix_buffer = std::string(value.substr(0, close));
        flush_matrix();
      }
      continue;
    }

    // Scalar or quoted assignment.
    std::string scalar(value);
    if (!scalar.empty() && scalar.back() == ';') scalar.pop_back();
    std::string_view sval = trim(scalar);
    if (field == "baseMVA") {
      double v;
      if (!parse_number(sval, v))
        throw ParseError("baseMVA is not a number", line_no);
      raw.base_mva = v;
      raw.has_base = true;
    } else if (field == "version") {
      std::string ver(sval);
      std::erase(ver, '\'');
      if (ver != "2")
        throw UnsupportedError("line " + std::to_string(line_no) + ": case version '" + ver +
                               "' is not supported");
    }
    // Other scalar fields are ignored.
  }
  if (!matrix_field.empty())
    throw ParseError("matrix '" + matrix_field + "' is never closed", matrix_start_line);
  return raw;
}

double column(const RawRow& row, size_t idx, const char* what) {
  if (idx >= row.values.size())
    throw ParseError(std::string("row is too short, missing ") + what, row.line);
  return row.values[idx];
}

int int_column(const RawRow& row, size_t idx, const char* what) {
  double v = column(row, idx, what);
  double r = std::round(v);
  if (!std::isfinite(v) || std::abs(v - r) > 1e-9)
    throw ParseError(std::string(what) + " must be an integer", row.line);
  return static_cast<int>(r);
}

}  // namespace

Network parse_case(const std::string& text, const ParseOptions& opts,
                   std::vector<Diagnostic>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back({Diagnostic::Severity::Warning, std::move(msg)});
  };

  RawCase raw = scan_case(text);
  if (!raw.has_base) throw ParseError("missing baseMVA");
  if (!(raw.base_mva > 0.0) || !std::isfinite(raw.base_mva))
    throw ParseError("baseMVA must be positive");
  if (raw.bus.empty()) throw ParseError("missing bus matrix");
  if (raw.gen.empty()) throw ParseError("missing gen matrix");
  if (raw.branch.empty()) throw ParseError("missing branch matrix");
  if (raw.gencost.empty()) throw ParseError("missing gencost matrix");

  Network net;
  net.name = raw.name;
  net.base_mva = raw.base_mva;

  for (const auto& row : raw.bus) {
    Bus b;
    b.id = int_column(row, 0, "bus id");
    int type = int_column(row, 1, "bus type");
    switch (type) {
      case 1: b.kind = BusKind::PQ; break;
      case 2: b.kind = BusKind::PV; break;
      case 3: b.kind = BusKind::Reference; break;
      case 4: b.kind = BusKind::Isolated; break;
      default:
        throw ParseError("unknown bus type " + std::to_string(type), row.line);
    }
    b.demand_pu = column(row, 2, "bus demand") / net.base_mva;
    net.buses.push_back(b);
  }

  if (raw.gencost.size() != raw.gen.size())
    throw ParseError("gencost must have exactly one row per generator row",
                     raw.gencost.front().line);

  int constant_terms = 0;
  for (size_t i = 0; i < raw.gen.size(); ++i) {
    const RawRow& row = raw.gen[i];
    if (int_column(row, 7, "generator status") <= 0) continue;

    Generator g;
    g.bus = int_column(row, 0, "generator bus");
    g.p_max_pu = column(row, 8, "generator maximum output") / net.base_mva;
    g.p_min_pu = column(row, 9, "generator minimum output") / net.base_mva;

    const RawRow& cost = raw.gencost[i];
    int model = int_column(cost, 0, "cost model");
    if (model == 1)
      throw UnsupportedError("line " + std::to_string(cost.line) +
                             ": piecewise-linear generator costs are not supported");
    if (model != 2)
      throw ParseError("unknown cost model " + std::to_string(model), cost.line);
    int ncost = int_column(cost, 3, "cost coefficient count");
    if (ncost < 1 || ncost > 3)
      throw UnsupportedError("line " + std::to_string(cost.line) +
                             ": only costs of degree two or less are supported");
    std::vector<double> coeff(ncost);  // highest degree first
    for (int c = 0; c < ncost; ++c) coeff[c] = column(cost, 4 + c, "cost coefficient");

    double linear = 0.0, constant = 0.0;
    if (ncost == 1) {
      constant = coeff[0];
    } else if (ncost == 2) {
      linear = coeff[0];
      constant = coeff[1];
    } else {
      if (coeff[0] != 0.0) {
        if (!opts.linearize_cost)
          throw UnsupportedError(
              "line " + std::to_string(cost.line) +
              ": quadratic cost term present; pass the linearize option to keep "
              "the linear coefficient only");
        warn("generator " + std::to_string(net.generators.size()) +
             ": quadratic cost term dropped, keeping the linear coefficient");
      }
      linear = coeff[1];
      constant = coeff[2];
    }
    if (constant != 0.0) ++constant_terms;
    g.cost_per_pu = linear * net.base_mva;
    net.generators.push_back(g);
  }

  int unlimited = 0, taps = 0, shifts = 0;
  for (const auto& row : raw.branch) {
    if (int_column(row, 10, "branch status") <= 0) continue;

    Line l;
    l.from_bus = int_column(row, 0, "branch from-bus");
    l.to_bus = int_column(row, 1, "branch to-bus");
    double x = column(row, 3, "branch reactance");
    if (x == 0.0) throw ParseError("branch reactance must be nonzero", row.line);
    l.susceptance_pu = 1.0 / x;
    double rate = column(row, 5, "branch rating");
    if (rate <= 0.0 || std::isinf(rate)) {
      l.flow_limit_pu = opts.unlimited_flow_limit_pu;
      ++unlimited;
    } else {
      l.flow_limit_pu = rate / net.base_mva;
    }
    if (row.values.size() > 8) {
      double tap = row.values[8];
      if (tap != 0.0 && tap != 1.0) ++taps;
    }
    if (row.values.size() > 9 && row.values[9] != 0.0) ++shifts;
    net.lines.push_back(l);
  }

  if (constant_terms > 0)
    warn(std::to_string(constant_terms) + " generator(s) have a constant cost term; ignored");
  if (unlimited > 0)
    warn(std::to_string(unlimited) + " branch(es) have no rating; flow limit set to " +
         std::to_string(opts.unlimited_flow_limit_pu) + " per unit");
  if (taps > 0)
    warn(std::to_string(taps) + " branch(es) have a transformer tap ratio; treated as 1");
  if (shifts > 0)
    warn(std::to_string(shifts) + " branch(es) have a phase-shift angle; treated as 0");

  for (int id : raw.fixed_lines) {
    if (id < 0 || id >= net.num_lines())
      throw ParseError("fixed_lines names line " + std::to_string(id) + " which does not exist");
    net.lines[id].switchable = false;
  }

  try {
    net.finalize();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return net;
}

Network parse_case_file(const std::string& path, const ParseOptions& opts,
                        std::vector<Diagnostic>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open case file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str(), opts, warnings);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

int bus_type_code(BusKind kind) {
  switch (kind) {
    case BusKind::PQ: return 1;
    case BusKind::PV: return 2;
    case BusKind::Reference: return 3;
    case BusKind::Isolated: return 4;
  }
  return 1;
}

}  // namespace

std::string serialize_case(const Network& net) {
  std::ostringstream out;
  out << "function mpc = " << (net.name.empty() ? "case" : net.name) << "\n";
  out << "mpc.version = '2';\n";
  out << "mpc.baseMVA = " << fmt(net.base_mva) << ";\n\n";

  out << "% bus_i type Pd Qd Gs Bs area Vm Va baseKV zone Vmax Vmin\n";
  out << "mpc.bus = [\n";
  for (const auto& b : net.buses) {
    out << "\t" << b.id << "\t" << bus_type_code(b.kind) << "\t"
        << fmt(b.demand_pu * net.base_mva) << "\t0\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;\n";
  }
  out << "];\n\n";

  out << "% bus Pg Qg Qmax Qmin Vg mBase status Pmax Pmin\n";
  out << "mpc.gen = [\n";
  for (const auto& g : net.generators) {
    out << "\t" << g.bus << "\t0\t0\t0\t0\t1\t" << fmt(net.base_mva) << "\t1\t"
        << fmt(g.p_max_pu * net.base_mva) << "\t" << fmt(g.p_min_pu * net.base_mva) << ";\n";
  }
  out << "];\n\n";

  out << "% fbus tbus r x b rateA rateB rateC ratio angle status\n";
  out << "mpc.branch = [\n";
  for (const auto& l : net.lines) {
    out << "\t" << l.from_bus << "\t" << l.to_bus << "\t0\t" << fmt(1.0 / l.susceptance_pu)
        << "\t0\t" << fmt(l.flow_limit_pu * net.base_mva) << "\t0\t0\t0\t0\t1;\n";
  }
  out << "];\n\n";

  out << "% model startup shutdown n c1 c0\n";
  out << "mpc.gencost = [\n";
  for (const auto& g : net.generators) {
    out << "\t2\t0\t0\t2\t" << fmt(g.cost_per_pu / net.base_mva) << "\t0;\n";
  }
  out << "];\n";

  std::vector<int> fixed;
  for (const auto& l : net.lines)
    if (!l.switchable) fixed.push_back(l.id);
  if (!fixed.empty()) {
    out << "\n% fixed_lines:";
    for (int id : fixed) out << " " << id;
    out << "\n";
  }
  return out.str();
}

std::string case_fingerprint(const Network& net) {
  std::string bytes = serialize_case(net);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace ots
