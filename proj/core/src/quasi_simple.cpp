#include "ptagame/quasi_simple.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

namespace ptg {

ValueOracle::ValueOracle(const GameArena& arena, SolveConfig cfg, ExploreOptions explore)
    : arena_(&arena), cfg_(std::move(cfg)), explore_(explore) {}

Rational ValueOracle::at(const ConcreteState& s) const {
  return at(s.location, s.valuation, region_of(arena_->context(), s.valuation));
}

Rational ValueOracle::at(LocationId l, const ClockValuation& nu, const ClockRegion& zeta) const {
  Key key{l, nu, zeta};
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  Rational v(0);
  if (!arena_->pta().location(l).is_final) {
    const Brg g = explore_rooted(*arena_, l, nu, zeta, explore_);
    v = solve_exact(g, cfg_).values[g.initial()].value();
  }
  std::lock_guard lock(mu_);
  cache_.emplace(std::move(key), v);
  return v;
}

std::size_t ValueOracle::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

Rational value_at(const GameArena& arena, const ConcreteState& s, const SolveConfig& cfg) {
  return ValueOracle(arena, cfg).at(s);
}

Evaluator as_evaluator(const ValueOracle& oracle) {
  return [&oracle](LocationId l, const ClockValuation& nu, const ClockRegion& zeta) { return oracle.at(l, nu, zeta); };
}

std::set<RegionKey> reachable_regions(const Brg& brg) {
  std::set<RegionKey> out;
  for (const auto& s : brg.states()) out.emplace(s.location, s.region);
  return out;
}

namespace {

// Fractions num/d for the positive blocks of zeta, in block order.
ClockValuation assemble(const ClockContext& ctx, const ClockRegion& zeta, const std::vector<std::uint64_t>& nums,
                        std::uint64_t d) {
  std::vector<Rational> v(ctx.size());
  const auto& blocks = zeta.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (ClockId c : blocks[i]) {
      v[c] = zeta.integer_part(c);
      if (i > 0) v[c] += Rational(static_cast<long>(nums[i - 1]), static_cast<long>(d));
    }
  return ClockValuation(ctx, std::move(v));
}

struct ClosureDraw {
  std::uint64_t d = 1;
  std::vector<std::uint64_t> nums;
};

ClosureDraw draw_closure(const ClockRegion& zeta, std::mt19937_64& rng) {
  ClosureDraw out;
  out.d = 1 + uniform_below(rng, 64);
  out.nums.resize(zeta.positive_block_count());
  for (auto& n : out.nums) n = uniform_below(rng, out.d + 1);
  std::sort(out.nums.begin(), out.nums.end());
  return out;
}

ClockValuation with_shift(const ClockContext& ctx, const ClockRegion& zeta, ClosureDraw draw, std::size_t from,
                          std::uint64_t u) {
  for (std::size_t i = from; i < draw.nums.size(); ++i) draw.nums[i] += u;
  return assemble(ctx, zeta, draw.nums, draw.d);
}

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Rational sup_distance(const ClockValuation& a, const ClockValuation& b) {
  Rational m(0);
  for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, abs(a[c] - b[c]));
  return m;
}

// Evaluates f at every point, spreading the work over up to `threads` workers.
std::vector<Rational> evaluate_all(const Evaluator& f, LocationId l, const ClockRegion& zeta,
                                   const std::vector<const ClockValuation*>& points, unsigned threads) {
  std::vector<Rational> out(points.size());
  const unsigned n = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  if (n <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = f(l, *points[i], zeta);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < points.size(); i += n) out[i] = f(l, *points[i], zeta);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

ClockValuation sample_interior(const ClockContext& ctx, const ClockRegion& zeta, std::mt19937_64& rng) {
  const std::size_t m = zeta.positive_block_count();
  if (m > 63) throw DomainError("too many fractional blocks to sample over denominators <= 64");
  const std::uint64_t d = m + 1 + uniform_below(rng, 64 - m);
  std::vector<std::uint64_t> pool(d - 1);
  std::iota(pool.begin(), pool.end(), 1);
  for (std::size_t i = 0; i < m; ++i) std::swap(pool[i], pool[i + uniform_below(rng, pool.size() - i)]);
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return assemble(ctx, zeta, pool, d);
}

ClockValuation sample_closure(const ClockContext& ctx, const ClockRegion& zeta, std::mt19937_64& rng) {
  const auto draw = draw_closure(zeta, rng);
  return assemble(ctx, zeta, draw.nums, draw.d);
}

std::optional<SimpleForm> fit_simple(const ValueOracle& oracle, LocationId l, const ClockRegion& zeta,
                                     std::size_t sample_count, std::uint64_t seed) {
  const auto& ctx = oracle.arena().context();
  auto rng = stream_for(seed, 0);
  std::vector<ClockValuation> pts{representative(ctx, zeta)};
  for (std::size_t i = 0; i < sample_count; ++i) pts.push_back(sample_interior(ctx, zeta, rng));
  std::vector<Rational> vals;
  for (const auto& p : pts) vals.push_back(oracle.at(l, p, zeta));

  auto fits = [&](std::optional<ClockId> c) -> std::optional<Integer> {
    auto offset = [&](std::size_t i) { return c ? Rational(vals[i] + pts[i][*c]) : vals[i]; };
    const Rational e = offset(0);
    if (denominator(e) != 1) return std::nullopt;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (offset(i) != e) return std::nullopt;
    return numerator(e);
  };
  if (auto e = fits(std::nullopt)) return SimpleForm::constant(*e);
  for (ClockId c = 0; c < ctx.size(); ++c) {
    if (zeta.has_zero_fraction(c)) continue;
    if (auto e = fits(c)) {
      const ClockId first = zeta.blocks()[zeta.block_of(c)].front();
      return SimpleForm::slope(*e - zeta.integer_part(c) + zeta.integer_part(first), first);
    }
  }
  return std::nullopt;
}

std::vector<SamplePair> sample_pairs(const ClockContext& ctx, const ClockRegion& zeta, std::size_t pair_count,
                                     std::uint64_t seed) {
  auto rng = stream_for(seed, 0);
  std::vector<SamplePair> out;
  for (std::size_t i = 0; i < pair_count; ++i) {
    auto a = sample_closure(ctx, zeta, rng);
    auto b = sample_closure(ctx, zeta, rng);
    out.push_back({std::move(a), std::move(b), std::nullopt});
  }
  const std::size_t m = zeta.positive_block_count();
  if (m == 0) return out;
  // Raising a suffix of the fractional blocks by a common amount stays in the closure.
  for (std::size_t i = 0; i < pair_count; ++i) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto draw = draw_closure(zeta, rng);
      if (draw.nums.back() >= draw.d) continue;
      const std::size_t from = uniform_below(rng, m);
      const std::uint64_t u = 1 + uniform_below(rng, draw.d - draw.nums.back());
      out.push_back({assemble(ctx, zeta, draw.nums, draw.d), with_shift(ctx, zeta, draw, from, u),
                     Rational(static_cast<long>(u), static_cast<long>(draw.d))});
      break;
    }
  }
  return out;
}

PropertyReport check_pairs(const Evaluator& f, LocationId l, const ClockRegion& zeta,
                           const std::vector<SamplePair>& pairs, const Rational& k_bound, unsigned threads) {
  std::map<ClockValuation, std::size_t> index;
  std::vector<const ClockValuation*> points;
  for (const auto& p : pairs)
    for (const auto* v : {&p.nu, &p.nu2})
      if (index.try_emplace(*v, points.size()).second) points.push_back(v);
  const auto vals = evaluate_all(f, l, zeta, points, threads);

  PropertyReport rep;
  for (const auto& p : pairs) {
    const Rational& a = vals[index.at(p.nu)];
    const Rational& b = vals[index.at(p.nu2)];
    const Rational dist = sup_distance(p.nu, p.nu2);
    const Rational diff = abs(a - b);
    if (dist > 0) {
      rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, Rational(diff / dist));
      if (diff > k_bound * dist) rep.lipschitz_violations.push_back({p.nu, p.nu2, a, b});
    } else if (diff != 0) {
      rep.lipschitz_violations.push_back({p.nu, p.nu2, a, b});
    }

    // Orient the pair so that lo <| hi, if the two are comparable at all.
    const ClockValuation* lo = &p.nu;
    const ClockValuation* hi = &p.nu2;
    const Rational* flo = &a;
    const Rational* fhi = &b;
    auto t = p.shift ? p.shift : diag_leq(p.nu, p.nu2);
    if (!t) {
      t = diag_leq(p.nu2, p.nu);
      std::swap(lo, hi);
      std::swap(flo, fhi);
    }
    if (t) {
      if (*flo < *fhi) rep.monotonicity_violations.push_back({*lo, *hi, *flo, *fhi});
      if (*flo - *fhi > *t) rep.nonexpansive_violations.push_back({*lo, *hi, *flo, *fhi});
    }
    ++rep.samples_checked;
  }
  return rep;
}

PropertyReport check_quasi_simple(const Evaluator& f, const ClockContext& ctx, LocationId l, const ClockRegion& zeta,
                                  const QuasiSimpleOptions& opts) {
  const Rational k = opts.k_bound ? *opts.k_bound : Rational(1 + static_cast<long>(ctx.size()));
  return check_pairs(f, l, zeta, sample_pairs(ctx, zeta, opts.pair_count, opts.seed), k, opts.threads);
}

PropertyReport check_quasi_simple(const ValueOracle& oracle, LocationId l, const ClockRegion& zeta,
                                  const QuasiSimpleOptions& opts) {
  return check_quasi_simple(as_evaluator(oracle), oracle.arena().context(), l, zeta, opts);
}

Evaluator plus_square(Evaluator f, ClockId c) {
  return [f = std::move(f), c](LocationId l, const ClockValuation& nu, const ClockRegion& z) {
    return Rational(f(l, nu, z) + nu[c] * nu[c]);
  };
}

Evaluator minus_twice(Evaluator f, ClockId c) {
  return [f = std::move(f), c](LocationId l, const ClockValuation& nu, const ClockRegion& z) {
    return Rational(f(l, nu, z) - 2 * nu[c]);
  };
}

Evaluator pointwise_min(Evaluator f, Evaluator g) {
  return [f = std::move(f), g = std::move(g)](LocationId l, const ClockValuation& nu, const ClockRegion& z) {
    return std::min(f(l, nu, z), g(l, nu, z));
  };
}

Evaluator pointwise_max(Evaluator f, Evaluator g) {
  return [f = std::move(f), g = std::move(g)](LocationId l, const ClockValuation& nu, const ClockRegion& z) {
    return std::max(f(l, nu, z), g(l, nu, z));
  };
}

Evaluator one_step(const GameArena& arena, Evaluator f, const BoundaryAction& act) {
  return [&arena, f = std::move(f), act](LocationId l, const ClockValuation& nu, const ClockRegion& z) {
    const BrgState s{l, nu, z, arena.owner(l), arena.pta().location(l).is_final};
    Rational v = reward(s, act);
    for (const auto& [next, p] : transition_distribution(arena, s, act))
      v += p * f(next.location, next.valuation, next.region);
    return v;
  };
}

namespace {

Rational one_step_value(const ValueOracle& oracle, const ConcreteState& s, const TimedAction& ta) {
  Rational v = ta.delay;
  for (const auto& [next, p] : concrete_step(oracle.arena(), s, ta)) v += p * oracle.at(next);
  return v;
}

}  // namespace

TimeMonotoneReport check_time_monotone(const ValueOracle& oracle, const ConcreteState& s, ActionId a,
                                       const ClockRegion& target, std::size_t grid_count) {
  const auto& arena = oracle.arena();
  const auto iv = delays_into(arena.context(), s.valuation, target);
  if (!iv) throw DomainError("target region is not in the future of the state");
  std::vector<Rational> ts;
  if (iv->is_point()) {
    ts.push_back(iv->lo);
  } else {
    const Rational width = iv->hi - iv->lo;
    for (std::size_t i = 0; i < grid_count; ++i)
      ts.push_back(iv->lo + width * Rational(static_cast<long>(i + 1), static_cast<long>(grid_count + 1)));
  }
  TimeMonotoneReport rep;
  for (const auto& t : ts) {
    const TimedAction ta{t, a};
    if (!timed_action_allowed(arena, s, ta))
      throw PreconditionError("action " + arena.pta().actions().at(a) + " is not enabled in the target region");
    rep.samples.emplace_back(t, one_step_value(oracle, s, ta));
  }
  for (std::size_t i = 0; i + 1 < rep.samples.size(); ++i)
    if (rep.samples[i].second > rep.samples[i + 1].second) rep.violations.push_back(i);
  rep.nondecreasing = rep.violations.empty();
  return rep;
}

GridOptimum grid_one_step(const ValueOracle& oracle, const ConcreteState& s, const Rational& h) {
  const auto& arena = oracle.arena();
  const auto& pta = arena.pta();
  if (h <= 0) throw DomainError("grid step must be positive");
  if (pta.location(s.location).is_final) throw PreconditionError("grid optimum requested at a final state");
  const int k = arena.context().k();

  std::set<Rational> delays;
  Rational horizon(k);
  for (const auto& v : s.valuation.values()) horizon = std::min(horizon, Rational(k - v));
  for (Rational t(0); t <= horizon; t += h) delays.insert(t);
  for (const auto& v : s.valuation.values())
    for (int b = 0; b <= k; ++b)
      if (b >= v && b - v <= horizon) delays.insert(b - v);

  const bool maximise = arena.owner(s.location) == Player::Max;
  std::optional<GridOptimum> best;
  std::size_t n = 0;
  for (const Edge* e : pta.edges_from(s.location))
    for (const auto& t : delays) {
      const TimedAction ta{t, e->action};
      if (!timed_action_allowed(arena, s, ta)) continue;
      ++n;
      const Rational v = one_step_value(oracle, s, ta);
      if (!best || (maximise ? v > best->value : v < best->value)) best = GridOptimum{v, t, e->action, 0};
    }
  if (!best) throw PreconditionError("no timed action is allowed at the state");
  best->candidates = n;
  return *best;
}

}  // namespace ptg
