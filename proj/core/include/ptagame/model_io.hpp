#pragma once

// JSON model documents:
//
//   { "name": "...", "clocks": ["c"], "k": 2,
//     "locations": [{"name": "l0", "owner": "min", "final": false, "invariant": "c <= 2"}],
//     "edges": [{"source": "l0", "action": "a", "guard": "c >= 1",
//                "branches": [{"prob": "1/2", "resets": ["c"], "target": "l0"}]}],
//     "initial": {"location": "l0", "valuation": {"c": "0"}} }
//
// Probabilities and clock values are strings ("num/den" or an integer);
// JSON numbers are rejected so that no binary floating value sneaks in.

#include "ptagame/pta_model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ptg {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Model {
  std::string name;
  GameArena arena;
  ConcreteState initial;
};

/// Structural errors (unknown names, malformed constraints, JSON numbers for
/// probabilities) raise ParseError. Semantic defects such as bad probability
/// sums or bounds above k are left for validate_model to report.
Model parse_model(std::string_view text);
Model load_model(const std::filesystem::path& path);

/// validate() plus the requirement that the initial state satisfies its invariant.
ValidationReport validate_model(const Model& model);

std::string dump_model(const Model& model);

}  // namespace ptg
