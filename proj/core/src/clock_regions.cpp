#include "ptagame/clock_regions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace ptg {

// ---------------------------------------------------------------------------
// ClockContext / ClockValuation

ClockContext::ClockContext(std::vector<std::string> clocks, int k)
    : clocks_(std::move(clocks)), k_(k) {
  if (k_ < 1) throw DomainError("clock bound k must be at least 1");
  if (clocks_.empty()) throw DomainError("at least one clock is required");
  if (clocks_.size() > ClockSet::kMaxClocks) throw DomainError("too many clocks");
  std::set<std::string> seen;
  for (const auto& name : clocks_) {
    if (name.empty()) throw DomainError("empty clock name");
    if (!seen.insert(name).second) throw DomainError("duplicate clock name '" + name + "'");
  }
}

std::optional<ClockId> ClockContext::find(std::string_view name) const {
  for (ClockId c = 0; c < clocks_.size(); ++c)
    if (clocks_[c] == name) return c;
  return std::nullopt;
}

ClockId ClockContext::index_of(std::string_view name) const {
  if (auto c = find(name)) return *c;
  throw DomainError("unknown clock '" + std::string(name) + "'");
}

ClockValuation::ClockValuation(const ClockContext& ctx, std::vector<Rational> values)
    : values_(std::move(values)) {
  if (values_.size() != ctx.size())
    throw DomainError("valuation has " + std::to_string(values_.size()) + " coordinates, expected " +
                      std::to_string(ctx.size()));
  for (ClockId c = 0; c < values_.size(); ++c) {
    if (values_[c] < 0 || values_[c] > ctx.k())
      throw DomainError("clock " + ctx.name(c) + " = " + to_fraction_string(values_[c]) +
                        " outside [0, " + std::to_string(ctx.k()) + "]");
  }
}

ClockValuation ClockValuation::zero(const ClockContext& ctx) {
  return ClockValuation(ctx, std::vector<Rational>(ctx.size(), Rational(0)));
}

ClockValuation ClockValuation::elapse(const ClockContext& ctx, const Rational& t) const {
  if (t < 0) throw DomainError("negative delay");
  std::vector<Rational> out = values_;
  for (auto& v : out) v += t;
  return ClockValuation(ctx, std::move(out));
}

ClockValuation ClockValuation::reset(ClockSet clocks) const {
  ClockValuation out = *this;
  for (ClockId c = 0; c < out.values_.size(); ++c)
    if (clocks.contains(c)) out.values_[c] = 0;
  return out;
}

bool ClockValuation::is_integral() const {
  return std::all_of(values_.begin(), values_.end(), [](const Rational& v) {
    return boost::multiprecision::denominator(v) == 1;
  });
}

std::string ClockValuation::to_string(const ClockContext& ctx) const {
  std::string out = "{";
  for (ClockId c = 0; c < values_.size(); ++c) {
    if (c) out += ",";
    out += ctx.name(c) + "=";
    if (boost::multiprecision::denominator(values_[c]) == 1)
      out += boost::multiprecision::numerator(values_[c]).str();
    else
      out += to_fraction_string(values_[c]);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Constraints

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEq: return ">=";
    case Relation::Greater: return ">";
  }
  return "?";
}

namespace {

Relation parse_relation(const std::string& op) {
  if (op == "<") return Relation::Less;
  if (op == "<=") return Relation::LessEq;
  if (op == "=" || op == "==") return Relation::Equal;
  if (op == ">=") return Relation::GreaterEq;
  if (op == ">") return Relation::Greater;
  throw DomainError("unknown relation '" + op + "'");
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool compare(const T& lhs, Relation rel, const T& rhs) {
  switch (rel) {
    case Relation::Less: return lhs < rhs;
    case Relation::LessEq: return lhs <= rhs;
    case Relation::Equal: return lhs == rhs;
    case Relation::GreaterEq: return lhs >= rhs;
    case Relation::Greater: return lhs > rhs;
  }
  return false;
}

// Compare x ~ bound where x is known to lie in the open interval (lo, lo+1).
bool compare_open_unit(int lo, Relation rel, int bound) {
  switch (rel) {
    case Relation::Less:
    case Relation::LessEq: return lo + 1 <= bound;
    case Relation::Equal: return false;
    case Relation::GreaterEq:
    case Relation::Greater: return lo >= bound;
  }
  return false;
}

}  // namespace

ClockConstraint parse_constraint(const ClockContext& ctx, std::string_view text, BoundCheck check) {
  static const std::regex atom(
      R"(^([A-Za-z_][A-Za-z0-9_]*)\s*(?:-\s*([A-Za-z_][A-Za-z0-9_]*))?\s*(<=|>=|==|<|>|=)\s*([0-9]+)$)");
  ClockConstraint out;
  std::string whole = trim(text);
  if (whole.empty()) throw DomainError("empty constraint (use 'true')");
  if (whole == "true") return out;
  std::stringstream ss(whole);
  std::string part;
  while (std::getline(ss, part, '&')) {
    std::string p = trim(part);
    std::smatch m;
    if (!std::regex_match(p, m, atom)) throw DomainError("malformed constraint atom '" + p + "'");
    SimpleConstraint sc;
    sc.clock = ctx.index_of(m[1].str());
    if (m[2].matched) {
      sc.other = ctx.index_of(m[2].str());
      if (*sc.other == sc.clock) throw DomainError("diagonal constraint on a single clock: '" + p + "'");
    }
    sc.rel = parse_relation(m[3].str());
    if (m[4].str().size() > 9) throw DomainError("bound too large in '" + p + "'");
    sc.bound = std::stoi(m[4].str());
    if (check == BoundCheck::Strict && sc.bound > ctx.k())
      throw DomainError("bound " + std::to_string(sc.bound) + " > k=" + std::to_string(ctx.k()) +
                        " in '" + p + "'");
    out.conjuncts.push_back(sc);
  }
  return out;
}

std::string to_string(const ClockContext& ctx, const SimpleConstraint& sc) {
  std::string out = ctx.name(sc.clock);
  if (sc.other) out += " - " + ctx.name(*sc.other);
  out += " ";
  out += to_string(sc.rel);
  out += " " + std::to_string(sc.bound);
  return out;
}

std::string to_string(const ClockContext& ctx, const ClockConstraint& cc) {
  if (cc.is_true()) return "true";
  std::string out;
  for (std::size_t i = 0; i < cc.conjuncts.size(); ++i) {
    if (i) out += " & ";
    out += to_string(ctx, cc.conjuncts[i]);
  }
  return out;
}

int max_bound(const ClockConstraint& cc) {
  int m = 0;
  for (const auto& sc : cc.conjuncts) m = std::max(m, sc.bound);
  return m;
}

bool satisfies(const ClockValuation& nu, const SimpleConstraint& sc) {
  Rational lhs = nu[sc.clock];
  if (sc.other) lhs -= nu[*sc.other];
  return compare(lhs, sc.rel, Rational(sc.bound));
}

bool satisfies(const ClockValuation& nu, const ClockConstraint& cc) {
  return std::all_of(cc.conjuncts.begin(), cc.conjuncts.end(),
                     [&](const SimpleConstraint& sc) { return satisfies(nu, sc); });
}

// ---------------------------------------------------------------------------
// Regions

ClockRegion::ClockRegion(const ClockContext& ctx, std::vector<int> integer_parts,
                         std::vector<std::vector<ClockId>> blocks)
    : int_parts_(std::move(integer_parts)), blocks_(std::move(blocks)) {
  const std::size_t n = ctx.size();
  if (int_parts_.size() != n) throw DomainError("region integer parts have wrong arity");
  if (blocks_.empty()) throw DomainError("region needs a (possibly empty) zero block");
  std::vector<int> seen(n, 0);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    auto& blk = blocks_[i];
    if (i > 0 && blk.empty()) throw DomainError("empty positive-fraction block");
    std::sort(blk.begin(), blk.end());
    for (ClockId c : blk) {
      if (c >= n) throw DomainError("region refers to unknown clock");
      if (seen[c]++) throw DomainError("clock appears twice in region partition");
    }
  }
  for (ClockId c = 0; c < n; ++c) {
    if (!seen[c]) throw DomainError("clock " + ctx.name(c) + " missing from region partition");
    if (int_parts_[c] < 0 || int_parts_[c] > ctx.k()) throw DomainError("integer part outside [0, k]");
    if (int_parts_[c] == ctx.k() && block_of(c) != 0)
      throw DomainError("clock at k must have zero fractional part");
  }
}

ClockRegion::ClockRegion(Unchecked, std::vector<int> integer_parts,
                         std::vector<std::vector<ClockId>> blocks)
    : int_parts_(std::move(integer_parts)), blocks_(std::move(blocks)) {
  for (auto& blk : blocks_) std::sort(blk.begin(), blk.end());
}

ClockRegion ClockRegion::zero(const ClockContext& ctx) {
  std::vector<ClockId> all(ctx.size());
  for (ClockId c = 0; c < all.size(); ++c) all[c] = c;
  return ClockRegion(ctx, std::vector<int>(ctx.size(), 0), {all});
}

std::size_t ClockRegion::block_of(ClockId c) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (std::find(blocks_[i].begin(), blocks_[i].end(), c) != blocks_[i].end()) return i;
  throw std::out_of_range("clock not in region");
}

std::string ClockRegion::to_string(const ClockContext& ctx) const {
  std::string out;
  for (ClockId c = 0; c < int_parts_.size(); ++c) {
    if (c) out += ",";
    if (has_zero_fraction(c))
      out += ctx.name(c) + "=" + std::to_string(int_parts_[c]);
    else
      out += std::to_string(int_parts_[c]) + "<" + ctx.name(c) + "<" + std::to_string(int_parts_[c] + 1);
  }
  std::size_t positive_clocks = 0;
  for (std::size_t i = 1; i < blocks_.size(); ++i) positive_clocks += blocks_[i].size();
  if (positive_clocks > 1) {
    out += " | ";
    for (std::size_t i = 1; i < blocks_.size(); ++i) {
      if (i > 1) out += "<";
      out += "{";
      for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
        if (j) out += ",";
        out += ctx.name(blocks_[i][j]);
      }
      out += "}";
    }
  }
  return out;
}

ClockRegion region_of(const ClockContext& ctx, const ClockValuation& nu) {
  if (nu.size() != ctx.size()) throw DomainError("valuation arity does not match context");
  std::vector<int> ints(ctx.size());
  std::map<Rational, std::vector<ClockId>> by_fraction;
  std::vector<ClockId> zero;
  for (ClockId c = 0; c < ctx.size(); ++c) {
    if (nu[c] < 0 || nu[c] > ctx.k()) throw DomainError("valuation coordinate outside [0, k]");
    ints[c] = floor_int(nu[c]);
    Rational frac = nu[c] - ints[c];
    if (frac == 0)
      zero.push_back(c);
    else
      by_fraction[frac].push_back(c);
  }
  std::vector<std::vector<ClockId>> blocks{std::move(zero)};
  for (auto& [frac, clocks] : by_fraction) blocks.push_back(std::move(clocks));
  return ClockRegion(ctx, std::move(ints), std::move(blocks));
}

bool is_thin(const ClockRegion& r) { return !r.zero_block().empty(); }

std::optional<ClockRegion> time_successor(const ClockContext& ctx, const ClockRegion& r) {
  std::vector<int> ints = r.integer_parts();
  const auto& blocks = r.blocks();
  if (is_thin(r)) {
    for (ClockId c : r.zero_block())
      if (ints[c] == ctx.k()) return std::nullopt;
    std::vector<std::vector<ClockId>> next{{}, r.zero_block()};
    next.insert(next.end(), blocks.begin() + 1, blocks.end());
    return ClockRegion(ctx, std::move(ints), std::move(next));
  }
  const auto& last = blocks.back();
  for (ClockId c : last) ++ints[c];
  std::vector<std::vector<ClockId>> next{last};
  next.insert(next.end(), blocks.begin() + 1, blocks.end() - 1);
  return ClockRegion(ctx, std::move(ints), std::move(next));
}

ClockRegion reset_region(const ClockRegion& r, ClockSet clocks) {
  std::vector<int> ints = r.integer_parts();
  std::vector<std::vector<ClockId>> blocks;
  blocks.reserve(r.blocks().size());
  std::vector<ClockId> zero;
  for (std::size_t i = 0; i < r.blocks().size(); ++i) {
    std::vector<ClockId> kept;
    for (ClockId c : r.blocks()[i]) {
      if (clocks.contains(c)) {
        ints[c] = 0;
        zero.push_back(c);
      } else if (i == 0) {
        zero.push_back(c);
      } else {
        kept.push_back(c);
      }
    }
    if (i > 0 && !kept.empty()) blocks.push_back(std::move(kept));
  }
  blocks.insert(blocks.begin(), std::move(zero));
  return ClockRegion(ClockRegion::Unchecked{}, std::move(ints), std::move(blocks));
}

bool satisfies(const ClockContext& ctx, const ClockRegion& r, const SimpleConstraint& sc) {
  if (sc.bound < 0 || sc.bound > ctx.k())
    throw DomainError("constraint bound " + std::to_string(sc.bound) + " outside [0, k]");
  if (!sc.other) {
    const int ip = r.integer_part(sc.clock);
    if (r.has_zero_fraction(sc.clock)) return compare(ip, sc.rel, sc.bound);
    return compare_open_unit(ip, sc.rel, sc.bound);
  }
  const int d = r.integer_part(sc.clock) - r.integer_part(*sc.other);
  const std::size_t bc = r.block_of(sc.clock);
  const std::size_t bo = r.block_of(*sc.other);
  if (bc == bo) return compare(d, sc.rel, sc.bound);
  // frac difference lies in (0,1) or (-1,0)
  return compare_open_unit(bc > bo ? d : d - 1, sc.rel, sc.bound);
}

bool satisfies(const ClockContext& ctx, const ClockRegion& r, const ClockConstraint& cc) {
  return std::all_of(cc.conjuncts.begin(), cc.conjuncts.end(),
                     [&](const SimpleConstraint& sc) { return satisfies(ctx, r, sc); });
}

bool in_closure(const ClockValuation& nu, const ClockRegion& r) {
  if (nu.size() != r.integer_parts().size()) return false;
  Rational prev = 0;
  for (std::size_t i = 0; i < r.blocks().size(); ++i) {
    const auto& blk = r.blocks()[i];
    std::optional<Rational> level;
    for (ClockId c : blk) {
      Rational g = nu[c] - r.integer_part(c);
      if (g < 0 || g > 1) return false;
      if (level && *level != g) return false;
      level = g;
    }
    if (i == 0 && level && *level != 0) return false;
    if (level) {
      if (*level < prev) return false;
      prev = *level;
    }
  }
  return true;
}

std::vector<ClockRegion> future_chain(const ClockContext& ctx, const ClockRegion& r) {
  std::vector<ClockRegion> chain{r};
  while (auto next = time_successor(ctx, chain.back())) chain.push_back(std::move(*next));
  return chain;
}

bool in_future(const ClockContext& ctx, const ClockRegion& r, const ClockRegion& later) {
  for (const auto& region : future_chain(ctx, r))
    if (region == later) return true;
  return false;
}

std::optional<BoundaryPoint> boundary_coordinates(const ClockContext& ctx, const ClockRegion& r,
                                                  const ClockRegion& thin) {
  if (!is_thin(thin)) throw DomainError("boundary_coordinates: target region is not thin");
  if (!in_future(ctx, r, thin)) return std::nullopt;
  const ClockId c = thin.zero_block().front();
  return BoundaryPoint{thin.integer_part(c), c};
}

std::optional<Rational> diag_leq(const ClockValuation& nu, const ClockValuation& nu2) {
  if (nu.size() != nu2.size()) return std::nullopt;
  std::optional<Rational> t;
  for (ClockId c = 0; c < nu.size(); ++c) {
    Rational d = nu2[c] - nu[c];
    if (d == 0) continue;
    if (d < 0) return std::nullopt;
    if (t && *t != d) return std::nullopt;
    t = d;
  }
  return t;
}

std::optional<DelayInterval> delays_into(const ClockContext& ctx, const ClockValuation& nu,
                                         const ClockRegion& r) {
  const auto chain = future_chain(ctx, region_of(ctx, nu));
  auto thin_time = [&](const ClockRegion& thin) {
    const ClockId c = thin.zero_block().front();
    return Rational(thin.integer_part(c)) - nu[c];
  };
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i] != r) continue;
    if (is_thin(r)) {
      Rational t = i == 0 ? Rational(0) : thin_time(r);
      return DelayInterval{t, t, true, true};
    }
    DelayInterval iv;
    if (i == 0) {
      iv.lo = 0;
      iv.lo_closed = true;
    } else {
      iv.lo = thin_time(chain[i - 1]);
      iv.lo_closed = false;
    }
    iv.hi = thin_time(chain.at(i + 1));
    iv.hi_closed = false;
    return iv;
  }
  return std::nullopt;
}

ClockValuation representative(const ClockContext& ctx, const ClockRegion& r) {
  std::vector<Rational> values(ctx.size());
  const auto m = static_cast<long>(r.positive_block_count());
  for (std::size_t i = 0; i < r.blocks().size(); ++i)
    for (ClockId c : r.blocks()[i])
      values[c] = Rational(r.integer_part(c)) + Rational(static_cast<long>(i), m + 1);
  return ClockValuation(ctx, std::move(values));
}

std::vector<ClockRegion> enumerate_regions(const ClockContext& ctx) {
  const std::size_t n = ctx.size();
  const int k = ctx.k();
  std::vector<ClockRegion> out;
  std::vector<int> ints(n, 0);
  std::vector<std::size_t> rank(n, 0);  // 0 = zero-fraction block

  std::function<void(std::size_t)> assign_rank = [&](std::size_t c) {
    if (c == n) {
      std::size_t max_rank = 0;
      for (auto r : rank) max_rank = std::max(max_rank, r);
      std::vector<std::vector<ClockId>> blocks(max_rank + 1);
      for (ClockId d = 0; d < n; ++d) blocks[rank[d]].push_back(d);
      for (std::size_t i = 1; i < blocks.size(); ++i)
        if (blocks[i].empty()) return;  // ranks must be contiguous
      out.emplace_back(ctx, ints, std::move(blocks));
      return;
    }
    if (ints[c] == k) {
      rank[c] = 0;
      assign_rank(c + 1);
      return;
    }
    for (std::size_t r = 0; r <= n; ++r) {
      rank[c] = r;
      assign_rank(c + 1);
    }
  };
  std::function<void(std::size_t)> assign_int = [&](std::size_t c) {
    if (c == n) {
      assign_rank(0);
      return;
    }
    for (int v = 0; v <= k; ++v) {
      ints[c] = v;
      assign_int(c + 1);
    }
  };
  assign_int(0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ptg
