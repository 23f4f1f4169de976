#include <random>
#include <sstream>

#include "doctest.h"
#include "lazysynth/abstraction.hpp"
#include "lazysynth/errors.hpp"
#include "lazysynth/systems.hpp"
#include "oracles.hpp"

using namespace lazysynth;

namespace {

struct FailingSource final : TransitionSource {
  std::size_t num_inputs() const override { return 1; }
  bool compute(int, std::size_t cell, std::size_t, std::vector<std::uint32_t>& out) const override {
    if (cell == 5) throw NumericalError("boom");
    out.push_back(static_cast<std::uint32_t>(cell));
    return false;
  }
};

}  // namespace

TEST_CASE("zero dynamics give exactly one self-loop per cell and input") {
  const LayerStack s({0.0, 0.0}, {4.0, 2.0}, {0.5, 0.5}, 0.3, 2);
  const ControlSystem sys = make_zero_system(2, 3);
  ReachTransitionSource src(sys, s, 10);
  TransitionCache cache(s, 3);
  for (int l = 1; l <= 2; ++l) {
    cache.explore(src, s.full_set(l));
    for (std::size_t c = 0; c < s.num_cells(l); ++c) {
      for (std::size_t u = 0; u < 3; ++u) {
        const auto v = cache.view(l, c, u);
        REQUIRE(v);
        CHECK_FALSE(v->leaves_y);
        REQUIRE(v->successors.size() == 1);
        CHECK(v->successors[0] == c);
      }
    }
  }
}

TEST_CASE("exploration is lazy and idempotent") {
  const LayerStack s({0.0, 0.0}, {4.0, 4.0}, {1.0, 1.0}, 0.3, 2);
  const ControlSystem sys = make_zero_system(2, 2);
  ReachTransitionSource src(sys, s, 10);
  TransitionCache cache(s, 2);
  CellSet some = s.empty_set(1);
  some.set(3);
  some.set(9);
  CHECK(cache.explore(src, some) == 4);
  CHECK(cache.computed_pairs(1) == 4);
  CHECK(cache.computed_pairs(2) == 0);
  CHECK(cache.explored_cells(1) == some);
  for (std::size_t c = 0; c < 16; ++c) {
    CHECK(cache.computed(1, c, 0) == some.test(c));
    CHECK(cache.view(1, c, 1).has_value() == some.test(c));
  }
  std::ostringstream before, after;
  cache.dump(before);
  CHECK(cache.explore(src, some) == 0);
  CHECK(cache.explore(src, s.empty_set(1)) == 0);
  cache.dump(after);
  CHECK(before.str() == after.str());
  CHECK(cache.computed_pairs(1) == 4);
  const auto succ = cache.successors(CellId{1, 9}, 1);
  REQUIRE(succ);
  CHECK(oracle::to_set(succ->cells) == oracle::IndexSet{9});
}

TEST_CASE("cache contents do not depend on the worker count") {
  const SafetyProblem p = dcdc_problem(0.005, 2);
  ReachTransitionSource src(p.system, p.stack, 10);
  std::string reference;
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    TransitionCache cache(p.stack, 2);
    cache.set_threads(threads);
    for (int l = 1; l <= 2; ++l) cache.explore(src, p.stack.full_set(l));
    std::ostringstream os;
    cache.dump(os);
    if (reference.empty()) reference = os.str();
    CHECK(os.str() == reference);
  }
  CHECK_FALSE(reference.empty());
}

TEST_CASE("successors over-approximate sampled disturbed transitions") {
  const SafetyProblem p = dcdc_problem(0.005, 2);
  ReachTransitionSource src(p.system, p.stack, 10);
  TransitionCache cache(p.stack, 2);
  cache.set_threads(0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::size_t missed = 0, checked = 0;
  for (int l = 1; l <= 2; ++l) {
    cache.explore(src, p.stack.full_set(l));
    const Vector half = p.stack.half_width(l);
    for (int k = 0; k < 500; ++k) {
      const std::size_t c = static_cast<std::size_t>((unit(rng) + 1.0) / 2.0 * 0.999999 *
                                                      static_cast<double>(p.stack.num_cells(l)));
      const std::size_t u = static_cast<std::size_t>(k % 2);
      const Vector center = p.stack.center(l, c);
      Vector x0 = center;
      for (std::size_t i = 0; i < 2; ++i) x0[i] += 0.999 * half[i] * unit(rng);
      std::vector<double> w(20);
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = p.system.disturbance[j % 2] * unit(rng);
      const Vector x = integrate_perturbed(p.system, x0, u, p.stack.tau(l), 10, w);
      const auto v = cache.view(l, c, u);
      REQUIRE(v);
      const auto target = cell_of(p.stack, x, l);
      ++checked;
      if (!target) {
        if (!v->leaves_y) ++missed;
        continue;
      }
      bool found = false;
      for (auto sidx : v->successors) found = found || sidx == target->index;
      if (!found) ++missed;
    }
  }
  CHECK(checked == 1000);
  CHECK(missed == 0);
}

TEST_CASE("explicit sources are copied verbatim") {
  const LayerStack s({0.0}, {4.0}, {1.0}, 1.0, 1);
  using Entry = ExplicitTransitionSource::Entry;
  ExplicitTransitionSource src(1, {{Entry{{1, 2}, false}, Entry{{}, true}, Entry{{2}, false},
                                    Entry{{}, false}}});
  TransitionCache cache(s, 1);
  cache.explore(src, s.full_set(1));
  CHECK(cache.view(1, 0, 0)->successors.size() == 2);
  CHECK(cache.view(1, 1, 0)->leaves_y);
  CHECK(cache.view(1, 3, 0)->successors.empty());
  CHECK_FALSE(cache.view(1, 3, 0)->leaves_y);
}

TEST_CASE("errors of the source are propagated after all workers finished") {
  const LayerStack s({0.0}, {64.0}, {0.0625}, 1.0, 1);
  FailingSource src;
  TransitionCache cache(s, 1);
  cache.set_threads(4);
  CHECK_THROWS_AS(cache.explore(src, s.full_set(1)), NumericalError);
  CHECK_FALSE(cache.computed(1, 5, 0));
}

TEST_CASE("cache preconditions") {
  const LayerStack s({0.0}, {4.0}, {1.0}, 1.0, 2);
  TransitionCache cache(s, 2);
  FailingSource one_input;
  CHECK_THROWS_AS(cache.explore(one_input, s.full_set(1)), PreconditionError);
  CHECK_THROWS_AS(cache.explore(one_input, CellSet(3, 1)), PreconditionError);
  CHECK_THROWS_AS(TransitionCache(s, 0), PreconditionError);
}
