#include <random>

#include "doctest.h"
#include "lazysynth/errors.hpp"
#include "lazysynth/synthesis.hpp"
#include "lazysynth/systems.hpp"
#include "oracles.hpp"

using namespace lazysynth;
using Entry = ExplicitTransitionSource::Entry;

namespace {

oracle::IndexSet random_safe(std::size_t n, std::mt19937_64& rng, double density) {
  oracle::IndexSet s;
  std::bernoulli_distribution b(density);
  for (std::size_t c = 0; c < n; ++c) {
    if (b(rng)) s.insert(c);
  }
  return s;
}

struct Instance {
  LayerStack stack;
  ExplicitTransitionSource source;
  oracle::IndexSet safe;
};

Instance make_instance(std::mt19937_64& rng, double w, double h, int layers, std::size_t inputs) {
  LayerStack stack({0.0, 0.0}, {w, h}, {1.0, 1.0}, 1.0, layers);
  auto src = oracle::random_explicit(stack, inputs, rng);
  auto safe = random_safe(stack.num_cells(1), rng, 0.85);
  return {std::move(stack), std::move(src), std::move(safe)};
}

}  // namespace

TEST_CASE("cpre on a 3-cell chain agrees with brute force") {
  // 0 -> {0,1}, 1 -> {2} or {1}, 2 -> leaves Y
  const LayerStack s({0.0}, {3.0}, {1.0}, 1.0, 1);
  ExplicitTransitionSource src(2, {{Entry{{0, 1}, false}, Entry{{0}, false},  //
                                    Entry{{2}, false}, Entry{{1}, false},     //
                                    Entry{{}, true}, Entry{{2}, true}}});
  TransitionCache cache(s, 2);
  cache.explore(src, s.full_set(1));
  for (std::uint32_t tm = 0; tm < 8; ++tm) {
    CellSet target = s.empty_set(1);
    for (std::size_t c = 0; c < 3; ++c) {
      if (tm >> c & 1u) target.set(c);
    }
    oracle::IndexSet expected;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t u = 0; u < 2; ++u) {
        const Entry& e = src.entry(1, c, u);
        bool ok = !e.leaves_y && !e.successors.empty();
        for (auto t : e.successors) ok = ok && (tm >> t & 1u);
        if (ok) expected.insert(c);
      }
    }
    CHECK(oracle::to_set(cpre(cache, target)) == expected);
    // restricted candidates
    CellSet cand = s.empty_set(1);
    cand.set(1);
    oracle::IndexSet restricted;
    if (expected.count(1)) restricted.insert(1);
    CHECK(oracle::to_set(cpre(cache, target, cand)) == restricted);
  }
}

TEST_CASE("cpre treats unexplored transitions as failing") {
  const LayerStack s({0.0}, {2.0}, {1.0}, 1.0, 1);
  ExplicitTransitionSource src(1, {{Entry{{0}, false}, Entry{{1}, false}}});
  TransitionCache cache(s, 1);
  CellSet only0 = s.empty_set(1);
  only0.set(0);
  cache.explore(src, only0);
  CHECK(oracle::to_set(cpre(cache, s.full_set(1))) == oracle::IndexSet{0});
}

TEST_CASE("single-layer fixpoint equals subset enumeration") {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 30; ++k) {
    Instance in = make_instance(rng, 4.0, 4.0, 1, 1 + static_cast<std::size_t>(k % 3));
    TransitionCache cache(in.stack, in.source.num_inputs());
    const auto res = single_layer_safe(cache, in.source, oracle::to_cells(in.stack, 1, in.safe));
    CHECK(oracle::to_set(res.winning) == oracle::enumerate_gfp(in.stack, in.source, in.safe));
  }
}

TEST_CASE("multi-layer fixpoint equals subset enumeration on small instances") {
  std::mt19937_64 rng(202);
  for (int k = 0; k < 20; ++k) {
    Instance in = make_instance(rng, 4.0, 4.0, 2, 2);
    const auto expected = oracle::enumerate_gfp(in.stack, in.source, in.safe);
    for (auto mode : {ExplorationMode::lazy, ExplorationMode::eager}) {
      TransitionCache cache(in.stack, 2);
      const CellSet safe_1 = oracle::to_cells(in.stack, 1, in.safe);
      const auto r = mode == ExplorationMode::lazy ? lazy_safe(cache, in.source, safe_1)
                                                   : eager_safe(cache, in.source, safe_1);
      CHECK(oracle::to_set(r.winning) == expected);
    }
  }
}

TEST_CASE("multi-layer fixpoint equals the Kleene oracle on 64-cell instances") {
  std::mt19937_64 rng(303);
  std::size_t nonempty = 0;
  for (int k = 0; k < 120; ++k) {
    Instance in = make_instance(rng, 8.0, 8.0, 2, 1 + static_cast<std::size_t>(k % 3));
    const auto expected = oracle::kleene_gfp(in.stack, in.source, in.safe);
    const CellSet safe_1 = oracle::to_cells(in.stack, 1, in.safe);
    TransitionCache lc(in.stack, in.source.num_inputs());
    TransitionCache ec(in.stack, in.source.num_inputs());
    const auto lazy = lazy_safe(lc, in.source, safe_1);
    const auto eager = eager_safe(ec, in.source, safe_1);
    REQUIRE(oracle::to_set(lazy.winning) == expected);
    REQUIRE(oracle::to_set(eager.winning) == expected);
    CHECK_NOTHROW(validate_controller(lc, lazy.controller, lazy.winning, safe_1));
    CHECK_NOTHROW(validate_controller(ec, eager.controller, eager.winning, safe_1));
    if (!expected.empty()) ++nonempty;
  }
  CHECK(nonempty >= 60);
}

TEST_CASE("lazy and eager agree step by step, lazy W inside eager W") {
  std::mt19937_64 rng(404);
  SynthesisOptions opts;
  opts.record_sets = true;
  for (int k = 0; k < 40; ++k) {
    Instance in = make_instance(rng, 8.0, 16.0, 3, 2);
    const CellSet safe_1 = oracle::to_cells(in.stack, 1, in.safe);
    TransitionCache lc(in.stack, 2), ec(in.stack, 2);
    const auto lazy = lazy_safe(lc, in.source, safe_1, opts);
    const auto eager = eager_safe(ec, in.source, safe_1, opts);
    REQUIRE(lazy.sets.size() == eager.sets.size());
    for (std::size_t j = 0; j < lazy.sets.size(); ++j) {
      CHECK(lazy.sets[j].iteration == eager.sets[j].iteration);
      CHECK(lazy.sets[j].layer == eager.sets[j].layer);
      CHECK(lazy.sets[j].upsilon_prime == eager.sets[j].upsilon_prime);
      CHECK(lazy.sets[j].w.subset_of(eager.sets[j].w));
    }
    CHECK(lazy.winning == eager.winning);
    for (int l = 1; l <= 3; ++l) {
      CHECK(lazy.controller.domain(l) == eager.controller.domain(l));
      CHECK(lc.computed_pairs(l) <= ec.computed_pairs(l));
    }
  }
}

TEST_CASE("safe sets shrink monotonically across iterations") {
  std::mt19937_64 rng(505);
  SynthesisOptions opts;
  opts.record_sets = true;
  for (int k = 0; k < 20; ++k) {
    Instance in = make_instance(rng, 8.0, 8.0, 2, 2);
    TransitionCache cache(in.stack, 2);
    const CellSet safe_1 = oracle::to_cells(in.stack, 1, in.safe);
    const auto r = lazy_safe(cache, in.source, safe_1, opts);
    CellSet prev = safe_1;
    for (const auto& rec : r.sets) {
      if (rec.layer != 1) continue;  // end of an iteration
      CHECK(rec.upsilon_prime.subset_of(prev));
      prev = rec.upsilon_prime;
    }
    CHECK(prev == r.winning);
  }
}

TEST_CASE("single-layer winning set is inside the multi-layer winning set") {
  std::mt19937_64 rng(606);
  for (int k = 0; k < 40; ++k) {
    Instance in = make_instance(rng, 8.0, 8.0, 3, 2);
    const CellSet safe_1 = oracle::to_cells(in.stack, 1, in.safe);
    TransitionCache c1(in.stack, 2), c2(in.stack, 2);
    const auto single = single_layer_safe(c1, in.source, safe_1);
    const auto multi = lazy_safe(c2, in.source, safe_1);
    CHECK(single.winning.subset_of(multi.winning));
  }
}

TEST_CASE("with one layer the multi-layer fixpoint is the single-layer fixpoint") {
  std::mt19937_64 rng(707);
  for (int k = 0; k < 20; ++k) {
    Instance in = make_instance(rng, 8.0, 4.0, 1, 3);
    const CellSet safe_1 = oracle::to_cells(in.stack, 1, in.safe);
    TransitionCache c1(in.stack, 3), c2(in.stack, 3);
    const auto single = single_layer_safe(c1, in.source, safe_1);
    const auto multi = lazy_safe(c2, in.source, safe_1);
    CHECK(single.winning == multi.winning);
    CHECK(single.controller == multi.controller);
  }
}

TEST_CASE("controller domains are disjoint at layer-1 resolution and cover the winning set") {
  std::mt19937_64 rng(808);
  for (int k = 0; k < 20; ++k) {
    Instance in = make_instance(rng, 8.0, 8.0, 3, 2);
    TransitionCache cache(in.stack, 2);
    const auto r = lazy_safe(cache, in.source, oracle::to_cells(in.stack, 1, in.safe));
    CellSet seen = in.stack.empty_set(1);
    for (int l = 1; l <= 3; ++l) {
      const CellSet lifted = gamma(in.stack, r.controller.domain(l), 1);
      CHECK((lifted & seen).empty());
      seen |= lifted;
      r.controller.domain(l).for_each([&](std::size_t c) {
        const auto u = r.controller.input(l, c);
        REQUIRE(u);
        CHECK(*u == *first_valid_input(cache, l, c, gamma(in.stack, r.winning, l)));
      });
    }
    CHECK(seen == r.winning);
  }
}

TEST_CASE("a tampered controller is rejected") {
  const LayerStack s({0.0}, {4.0}, {1.0}, 1.0, 1);
  // cell 1 stays with input 0 and jumps to cell 3 (unsafe) with input 1
  ExplicitTransitionSource src(2, {{Entry{{0}, false}, Entry{{0}, false},  //
                                    Entry{{1}, false}, Entry{{3}, false},  //
                                    Entry{{2}, false}, Entry{{2}, false},  //
                                    Entry{{3}, false}, Entry{{3}, false}}});
  CellSet safe = s.empty_set(1);
  safe.set(0);
  safe.set(1);
  safe.set(2);
  TransitionCache cache(s, 2);
  const auto r = lazy_safe(cache, src, safe);
  CHECK(r.winning == safe);
  CHECK_NOTHROW(validate_controller(cache, r.controller, r.winning, safe));
  MultiController bad = r.controller;
  bad.assign(1, 1, 1);
  CHECK_THROWS_AS(validate_controller(cache, bad, r.winning, safe), PropertyViolation);
  MultiController partial(s);
  partial.assign(1, 0, 0);
  CHECK_THROWS_AS(validate_controller(cache, partial, r.winning, safe), PropertyViolation);
}

TEST_CASE("zero dynamics: everything safe is winning, coarsest layer first, nothing outside T explored") {
  const LayerStack s({0.0, 0.0}, {4.0, 4.0}, {1.0, 1.0}, 0.1, 2);
  SafetyProblem p{make_zero_system(2, 2), s, SafeSet{Box{{0.0, 0.0}, {3.0, 4.0}}, {}}, 10};
  ReachTransitionSource src(p.system, p.stack, 10);
  TransitionCache cache(p.stack, 2);
  const CellSet safe_1 = safe_cells(p.stack, p.safe, 1);
  const auto r = lazy_safe(cache, src, safe_1);
  CHECK(r.winning == safe_1);
  CHECK(r.controller.domain(2).count() == 2);  // the 2x2 blocks with x < 2
  CHECK(r.controller.domain(1).count() == 4);  // the strip 2 <= x < 3
  CHECK(cache.explored_cells(1).subset_of(safe_1));
  CHECK(cache.explored_cells(2).subset_of(gamma(s, safe_1, 2)));
  CHECK(r.stats.iterations == 1);
}

TEST_CASE("desk-scale converter: lazy equals eager") {
  const SafetyProblem p = dcdc_problem(0.00125, 3);
  const auto lazy = lazy_safe(p, {}, 0);
  const auto eager = eager_safe(p, {}, 0);
  CHECK_FALSE(lazy.winning.empty());
  CHECK(lazy.winning == eager.winning);
  for (int l = 1; l <= 3; ++l) CHECK(lazy.controller.domain(l) == eager.controller.domain(l));
  CHECK(lazy.stats.layers[0].computed_pairs < eager.stats.layers[0].computed_pairs);
}
