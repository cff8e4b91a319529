#include "doctest.h"
#include "support.hpp"

#include "ptagame/simulation.hpp"

#include <cmath>

using namespace ptg;
using ptg::test::at;
using ptg::test::fixture;

namespace {

struct Profile {
  ConcretizedStrategy min;
  ConcretizedStrategy max;
};

Profile optimal(const Model& m, Rational eps = Rational(1, 1000), bool decaying = false) {
  const Brg g = explore(m.arena, m.initial);
  const auto r = solve_exact(g);
  auto table = std::make_shared<const StrategyTable>(g, r.min, r.max);
  return {{table, Player::Min, eps, decaying}, {table, Player::Max, eps, decaying}};
}

Rational initial_value(const Model& m) { return solve_exact(explore(m.arena, m.initial)).values[0].value(); }

}  // namespace

TEST_CASE("thin targets are hit exactly") {
  const auto m = fixture("M1");
  const auto p = optimal(m);
  const auto ta = concretize_action(p.min, m.initial);
  CHECK(ta.delay == 1);
  CHECK(m.arena.pta().actions()[ta.action] == "a");
}

TEST_CASE("suprema are approached from inside") {
  const auto m = fixture("M1x");
  const auto& ctx = m.arena.context();
  const auto p = optimal(m);
  const auto ta = concretize_action(p.max, m.initial);
  CHECK(ta.delay == Rational(1999, 1000));
  const auto after = m.initial.valuation.elapse(ctx, ta.delay);
  CHECK(region_of(ctx, after) == region_of(ctx, ClockValuation(ctx, {Rational(3, 2)})));

  auto wide = p.max;
  wide.epsilon = 5;
  CHECK(concretize_action(wide, m.initial).delay == Rational(3, 2));

  auto decay = p.max;
  decay.decaying = true;
  CHECK(concretize_action(decay, m.initial, 0).delay == 2 - Rational(1, 2000));
  CHECK(concretize_action(decay, m.initial, 3).delay == 2 - Rational(1, 16000));

  CHECK_THROWS_AS(concretize_action(p.min, m.initial), PreconditionError);
}

TEST_CASE("off-graph states are solved from their own root") {
  const auto m = fixture("M1x");
  const auto p = optimal(m);
  const auto s = at(m, "l0", {Rational(1, 7)});
  const auto ta = concretize_action(p.max, s);
  CHECK(ta.delay == 2 - Rational(1, 7) - Rational(1, 1000));
  CHECK(p.max.table->solved_roots() == 1);
  concretize_action(p.max, s);
  CHECK(p.max.table->solved_roots() == 1);
  CHECK_FALSE(p.max.table->choose(at(m, "lf", {2})).has_value());
}

TEST_CASE("branch sampling follows exact thresholds") {
  const auto m = fixture("M2");
  const StateDistribution dist{{at(m, "l0", {0}), Rational(1, 3)}, {at(m, "lf", {1}), Rational(2, 3)}};
  std::mt19937_64 rng(42);
  std::size_t first = 0;
  const std::size_t n = 30000;
  for (std::size_t i = 0; i < n; ++i) first += sample_branch(dist, rng) == 0;
  CHECK(std::abs(static_cast<double>(first) / n - 1.0 / 3) < 0.015);

  const StateDistribution sure{{at(m, "lf", {1}), Rational(1)}};
  CHECK(sample_branch(sure, rng) == 0);
  CHECK_THROWS_AS(sample_branch({}, rng), PreconditionError);

  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 50; ++i) CHECK(sample_branch(dist, a) == sample_branch(dist, b));
}

TEST_CASE("uniform_below covers its range without bias") {
  std::mt19937_64 rng(1);
  std::vector<int> counts(7);
  for (int i = 0; i < 70000; ++i) ++counts[uniform_below(rng, 7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(uniform_below(rng, 1) == 0);
}

TEST_CASE("deterministic runs") {
  const auto m = fixture("M1");
  const auto p = optimal(m);
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
    const auto rec = simulate_run(m.arena, p.min, p.max, m.initial, seed);
    CHECK(rec.reached_target);
    CHECK(rec.total_time == 1);
    CHECK(rec.steps == 1);
  }
  const auto capped = simulate_run(m.arena, p.min, p.max, m.initial, 1, 0);
  CHECK_FALSE(capped.reached_target);
  CHECK(capped.total_time == 0);
  CHECK(capped.steps == 0);
}

TEST_CASE("each retry of M2 costs exactly one") {
  const auto m = fixture("M2");
  const auto p = optimal(m);
  const auto l0 = *m.arena.pta().find_location("l0");
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    const auto rec = simulate_run(m.arena, p.min, p.max, m.initial, seed, 10'000, true);
    REQUIRE(rec.reached_target);
    CHECK(rec.total_time == Rational(static_cast<long>(rec.steps)));
    if (rec.steps != 3) continue;
    // stay, stay, done
    found = true;
    CHECK(rec.total_time == 3);
    REQUIRE(rec.trace->size() == 3);
    CHECK((*rec.trace)[1].state.location == l0);
    CHECK((*rec.trace)[2].state.location == l0);
  }
  CHECK(found);
}

TEST_CASE("every simulated step is legal") {
  for (const auto& name : test::fixture_names()) {
    const auto m = fixture(name);
    if (!check_assumption_reach(explore(m.arena, m.initial)).ok) continue;
    const auto p = optimal(m);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto rec = simulate_run(m.arena, p.min, p.max, m.initial, seed, 10'000, true);
      CHECK(rec.reached_target);
      Rational total(0);
      for (std::size_t i = 0; i < rec.trace->size(); ++i) {
        const auto& st = (*rec.trace)[i];
        CHECK(is_valid_state(m.arena, st.state));
        CHECK(timed_action_allowed(m.arena, st.state, st.action));
        total += st.action.delay;
        const auto dist = concrete_step(m.arena, st.state, st.action);
        REQUIRE(st.branch < dist.size());
        if (i + 1 < rec.trace->size()) CHECK((*rec.trace)[i + 1].state == dist[st.branch].first);
      }
      CHECK(total == rec.total_time);
    }
  }
}

TEST_CASE("estimates of deterministic and random fixtures") {
  const auto m1 = fixture("M1");
  const auto p1 = optimal(m1);
  const auto e1 = estimate_value(m1.arena, p1.min, p1.max, m1.initial, 500, 7);
  CHECK(e1.mean == 1.0);
  CHECK(e1.half_width == 0.0);
  CHECK(e1.exact_mean == 1);
  CHECK(e1.unreached_fraction == 0.0);
  CHECK(estimate_value(m1.arena, p1.min, p1.max, m1.initial, 2, 7).half_width == 0.0);
  CHECK_THROWS_AS(estimate_value(m1.arena, p1.min, p1.max, m1.initial, 1, 7), DomainError);

  const auto m2 = fixture("M2");
  const auto p2 = optimal(m2);
  const auto e2 = estimate_value(m2.arena, p2.min, p2.max, m2.initial, 100'000, 7);
  CHECK(e2.unreached_fraction == 0.0);
  CHECK(e2.half_width > 0);
  CHECK(std::abs(e2.mean - 2.0) <= 3 * e2.half_width);
  // Geometric number of retries with p = 1/2: variance 2.
  CHECK(std::abs(e2.half_width - 1.96 * std::sqrt(2.0 / 100'000)) < 1e-3);
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto m = fixture("M3");
  const auto p = optimal(m);
  EstimateOptions one, four;
  four.threads = 4;
  const auto a = estimate_value(m.arena, p.min, p.max, m.initial, 4000, 3, one);
  const auto b = estimate_value(m.arena, p.min, p.max, m.initial, 4000, 3, four);
  CHECK(a.exact_mean == b.exact_mean);
  CHECK(a.half_width == b.half_width);
}

TEST_CASE("concretised strategies are near-optimal") {
  const Rational eps(1, 1000);
  for (const auto& name : test::fixture_names()) {
    const auto m = fixture(name);
    if (!check_assumption_reach(explore(m.arena, m.initial)).ok) continue;
    const auto p = optimal(m, eps, true);
    const auto e = estimate_value(m.arena, p.min, p.max, m.initial, 20'000, 11);
    const double v = to_double(initial_value(m));
    CHECK_MESSAGE(std::abs(e.mean - v) <= 2 * to_double(eps) + 3 * e.half_width, name);
  }
}

TEST_CASE("reached fraction grows with the step cap") {
  const auto m = fixture("M2");
  const auto p = optimal(m);
  double prev = -1;
  for (std::size_t cap : {1U, 2U, 4U, 8U, 10'000U}) {
    EstimateOptions opts;
    opts.step_cap = cap;
    const auto e = estimate_value(m.arena, p.min, p.max, m.initial, 2000, 5, opts);
    const double reached = 1 - e.unreached_fraction;
    CHECK(reached >= prev);
    prev = reached;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("trace formatting") {
  const auto m = fixture("M2");
  const auto p = optimal(m);
  const auto rec = simulate_run(m.arena, p.min, p.max, m.initial, 1, 10'000, true);
  const auto text = format_trace(m.arena, *rec.trace);
  CHECK(text.find("l0 {c=0} | a after 1 | branch") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rec.steps));
}
