#pragma once

#include <string>
#include <vector>

#include "network.hpp"

namespace ots {

struct ParseOptions {
  // Replace a quadratic cost term with its linear coefficient instead of
  // rejecting the file.
  bool linearize_cost = false;
  // Flow limit assigned to branches whose rating is 0 (meaning "unlimited").
  double unlimited_flow_limit_pu = 100.0;
};

// Parses the MATPOWER case subset handled by this toolkit: bus, gen, branch,
// gencost matrices of a version-2 case struct. Out-of-service rows are
// dropped. Throws ParseError / UnsupportedError with a line number. Non-fatal
// oddities (tap ratios, constant cost terms, ...) are appended to *warnings
// when given.
Network parse_case(const std::string& text, const ParseOptions& opts = {},
                   std::vector<Diagnostic>* warnings = nullptr);

Network parse_case_file(const std::string& path, const ParseOptions& opts = {},
                        std::vector<Diagnostic>* warnings = nullptr);

// Writes a case that parse_case maps back onto the same Network.
std::string serialize_case(const Network& net);

// Stable hex digest of the serialized case; used to pair training data with
// the network it was computed on.
std::string case_fingerprint(const Network& net);

}  // namespace ots
