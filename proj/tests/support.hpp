#pragma once

#include "ptagame/model_io.hpp"

#include <string>
#include <vector>

namespace ptg::test {

inline Model fixture(const std::string& name) {
  return load_model(std::string(PTAGAME_FIXTURE_DIR) + "/" + name + ".json");
}

inline ConcreteState at(const Model& m, const std::string& loc, std::vector<Rational> vals) {
  const auto& pta = m.arena.pta();
  return ConcreteState{*pta.find_location(loc), ClockValuation(pta.context(), std::move(vals))};
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"M1", "M1x", "M2", "M3", "M2-unreachable", "M4"};
  return names;
}

}  // namespace ptg::test
