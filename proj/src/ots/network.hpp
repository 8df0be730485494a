#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace ots {

enum class BusKind { PQ, PV, Reference, Isolated };

struct Bus {
  int id = 0;  // label from the source data, not necessarily contiguous
  BusKind kind = BusKind::PQ;
  double demand_pu = 0.0;
};

struct Generator {
  int id = 0;   // dense index in file order
  int bus = 0;  // bus label
  double p_min_pu = 0.0;
  double p_max_pu = 0.0;
  double cost_per_pu = 0.0;  // cost of one per-unit of output
};

struct Line {
  int id = 0;  // dense index among in-service branches, file order
  int from_bus = 0;
  int to_bus = 0;
  double susceptance_pu = 0.0;
  double flow_limit_pu = 0.0;
  bool switchable = true;
};

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Warning;
  std::string message;
};

// A power network snapshot. Treated as immutable once finalize() has run;
// solvers and instances hold const references or shared pointers to it.
class Network {
 public:
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;

  // Builds the adjacency indexes below. Throws ValidationError on duplicate
  // bus labels or references to missing buses; softer defects are left to
  // validate().
  void finalize();

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_generators() const { return static_cast<int>(generators.size()); }
  int num_lines() const { return static_cast<int>(lines.size()); }

  // Dense index of a bus label; -1 when the label is unknown.
  int bus_index(int bus_label) const;

  const std::vector<int>& generators_at(int bus_idx) const { return gens_at_bus_[bus_idx]; }
  const std::vector<int>& lines_from(int bus_idx) const { return lines_from_bus_[bus_idx]; }
  const std::vector<int>& lines_to(int bus_idx) const { return lines_to_bus_[bus_idx]; }

  // Index of the single reference bus; -1 if there is none.
  int reference_bus() const { return reference_bus_; }

  std::vector<int> switchable_line_ids() const;

 private:
  std::unordered_map<int, int> bus_index_;
  std::vector<std::vector<int>> gens_at_bus_;
  std::vector<std::vector<int>> lines_from_bus_;
  std::vector<std::vector<int>> lines_to_bus_;
  int reference_bus_ = -1;
};

// Structural checks beyond what finalize() enforces. Error-severity entries
// mean the network cannot be solved; warnings flag suspicious but usable
// data (zero-demand system, isolated buses carrying load, ...).
std::vector<Diagnostic> validate(const Network& net);

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Diagnostic::Severity::Error) return true;
  return false;
}

}  // namespace ots
