#include "ptagame/model_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ptg {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

Rational exact_value(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number()) throw ParseError(where + ": floating-point numbers are not accepted; use \"num/den\"");
  if (!v.is_string()) throw ParseError(where + ": expected a \"num/den\" string");
  const auto text = v.get<std::string>();
  if (text.find_first_of(".eE") != std::string::npos)
    throw ParseError(where + ": decimal literal '" + text + "' not accepted; use \"num/den\"");
  try {
    return parse_rational(text);
  } catch (const DomainError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

ClockConstraint constraint_field(const ClockContext& ctx, const json& obj, const char* key,
                                 const std::string& where) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  if (!v.is_string()) throw ParseError(where + ": '" + key + "' must be a constraint string");
  try {
    return parse_constraint(ctx, v.get<std::string>(), BoundCheck::Deferred);
  } catch (const DomainError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

Model from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("model document must be a JSON object");
  const json& clocks_j = require(doc, "clocks", "model");
  if (!clocks_j.is_array()) throw ParseError("model: 'clocks' must be a list");
  std::vector<std::string> clocks;
  for (const auto& c : clocks_j) {
    if (!c.is_string()) throw ParseError("model: clock names must be strings");
    clocks.push_back(c.get<std::string>());
  }
  const json& k_j = require(doc, "k", "model");
  if (!k_j.is_number_integer()) throw ParseError("model: 'k' must be an integer");

  std::optional<ClockContext> ctx_opt;
  try {
    ctx_opt.emplace(std::move(clocks), k_j.get<int>());
  } catch (const DomainError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  const ClockContext& ctx = *ctx_opt;

  std::vector<Location> locations;
  std::vector<Player> owners;
  const json& locs_j = require(doc, "locations", "model");
  if (!locs_j.is_array() || locs_j.empty()) throw ParseError("model: 'locations' must be a nonempty list");
  for (const auto& lj : locs_j) {
    Location loc;
    loc.name = require_string(lj, "name", "location");
    const std::string where = "location " + loc.name;
    const std::string owner = lj.value("owner", std::string("min"));
    if (owner != "min" && owner != "max") throw ParseError(where + ": owner must be 'min' or 'max'");
    if (lj.contains("final") && !lj.at("final").is_boolean()) throw ParseError(where + ": 'final' must be a boolean");
    loc.is_final = lj.value("final", false);
    loc.invariant = constraint_field(ctx, lj, "invariant", where);
    owners.push_back(owner == "min" ? Player::Min : Player::Max);
    locations.push_back(std::move(loc));
  }
  auto location_id = [&](const std::string& name, const std::string& where) {
    for (LocationId l = 0; l < locations.size(); ++l)
      if (locations[l].name == name) return l;
    throw ParseError(where + ": unknown location '" + name + "'");
  };

  std::vector<std::string> actions;
  std::vector<Edge> edges;
  const json& edges_j = doc.contains("edges") ? doc.at("edges") : json::array();
  if (!edges_j.is_array()) throw ParseError("model: 'edges' must be a list");
  for (const auto& ej : edges_j) {
    Edge e;
    const std::string src = require_string(ej, "source", "edge");
    const std::string act = require_string(ej, "action", "edge");
    const std::string where = "edge (" + src + ", " + act + ")";
    e.source = location_id(src, where);
    auto it = std::find(actions.begin(), actions.end(), act);
    if (it == actions.end()) {
      actions.push_back(act);
      e.action = actions.size() - 1;
    } else {
      e.action = static_cast<ActionId>(it - actions.begin());
    }
    e.guard = constraint_field(ctx, ej, "guard", where);
    const json& br_j = require(ej, "branches", where);
    if (!br_j.is_array() || br_j.empty()) throw ParseError(where + ": 'branches' must be a nonempty list");
    for (const auto& bj : br_j) {
      Branch b;
      b.probability = exact_value(require(bj, "prob", where), where + " prob");
      if (bj.contains("resets")) {
        if (!bj.at("resets").is_array()) throw ParseError(where + ": 'resets' must be a list");
        for (const auto& rc : bj.at("resets")) {
          if (!rc.is_string()) throw ParseError(where + ": reset entries must be clock names");
          auto c = ctx.find(rc.get<std::string>());
          if (!c) throw ParseError(where + ": unknown clock '" + rc.get<std::string>() + "'");
          b.resets.insert(*c);
        }
      }
      b.target = location_id(require_string(bj, "target", where), where);
      e.branches.push_back(std::move(b));
    }
    edges.push_back(std::move(e));
  }

  const json& init_j = require(doc, "initial", "model");
  const LocationId init_loc = location_id(require_string(init_j, "location", "initial"), "initial");
  std::vector<Rational> init_vals(ctx.size(), Rational(0));
  if (init_j.contains("valuation")) {
    const json& vj = init_j.at("valuation");
    if (!vj.is_object()) throw ParseError("initial: 'valuation' must map clock names to values");
    for (const auto& [name, value] : vj.items()) {
      auto c = ctx.find(name);
      if (!c) throw ParseError("initial: unknown clock '" + name + "'");
      init_vals[*c] = exact_value(value, "initial valuation of " + name);
    }
  }

  try {
    ClockValuation init_val(ctx, std::move(init_vals));
    Pta pta(ctx, std::move(locations), std::move(actions), std::move(edges));
    GameArena arena(std::move(pta), std::move(owners));
    return Model{doc.value("name", std::string()), std::move(arena), ConcreteState{init_loc, std::move(init_val)}};
  } catch (const DomainError& e) {
    throw ParseError(std::string("model: ") + e.what());
  } catch (const ModelError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

}  // namespace

Model parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return from_json(doc);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

ValidationReport validate_model(const Model& model) {
  ValidationReport report = validate(model.arena);
  const auto& pta = model.arena.pta();
  if (max_bound(pta.location(model.initial.location).invariant) <= pta.context().k() &&
      !is_valid_state(model.arena, model.initial))
    report.violations.push_back({"initial", "initial state violates the invariant of " +
                                                pta.location(model.initial.location).name});
  return report;
}

std::string dump_model(const Model& model) {
  const auto& pta = model.arena.pta();
  const auto& ctx = pta.context();
  json doc;
  if (!model.name.empty()) doc["name"] = model.name;
  doc["clocks"] = ctx.clocks();
  doc["k"] = ctx.k();
  doc["locations"] = json::array();
  for (LocationId l = 0; l < pta.locations().size(); ++l) {
    const auto& loc = pta.location(l);
    doc["locations"].push_back({{"name", loc.name},
                                {"owner", std::string(to_string(model.arena.owner(l)))},
                                {"final", loc.is_final},
                                {"invariant", to_string(ctx, loc.invariant)}});
  }
  doc["edges"] = json::array();
  for (const auto& e : pta.edges()) {
    json branches = json::array();
    for (const auto& b : e.branches) {
      json resets = json::array();
      for (ClockId c = 0; c < ctx.size(); ++c)
        if (b.resets.contains(c)) resets.push_back(ctx.name(c));
      branches.push_back({{"prob", to_fraction_string(b.probability)},
                          {"resets", resets},
                          {"target", pta.location(b.target).name}});
    }
    doc["edges"].push_back({{"source", pta.location(e.source).name},
                            {"action", pta.actions()[e.action]},
                            {"guard", to_string(ctx, e.guard)},
                            {"branches", branches}});
  }
  json val = json::object();
  for (ClockId c = 0; c < ctx.size(); ++c) val[ctx.name(c)] = to_fraction_string(model.initial.valuation[c]);
  doc["initial"] = {{"location", pta.location(model.initial.location).name}, {"valuation", val}};
  return doc.dump(2);
}

}  // namespace ptg
