#include <numbers>
#include <random>

#include "doctest.h"
#include "lazysynth/errors.hpp"
#include "lazysynth/grid.hpp"
#include "oracles.hpp"

using namespace lazysynth;

namespace {

LayerStack square4(int layers) { return LayerStack({0.0, 0.0}, {4.0, 4.0}, {1.0, 1.0}, 0.5, layers); }

CellSet random_set(const LayerStack& s, int l, std::mt19937_64& rng, double density) {
  CellSet out = s.empty_set(l);
  std::bernoulli_distribution b(density);
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (b(rng)) out.set(c);
  }
  return out;
}

}  // namespace

TEST_CASE("layer widths and sampling times double") {
  const LayerStack s({0.0, 1.0}, {8.0, 5.0}, {0.5, 0.25}, 0.1, 3);
  CHECK(s.num_layers() == 3);
  CHECK(s.layer(1).counts == MultiIndex{16, 16});
  CHECK(s.layer(2).counts == MultiIndex{8, 8});
  CHECK(s.layer(3).counts == MultiIndex{4, 4});
  CHECK(s.layer(3).eta[0] == doctest::Approx(2.0));
  CHECK(s.layer(3).eta[1] == doctest::Approx(1.0));
  CHECK(s.tau(2) == doctest::Approx(0.2));
  CHECK(s.tau(3) == doctest::Approx(0.4));
  CHECK(s.num_cells(1) == 256);
  CHECK(s.cell_volume(2) == doctest::Approx(0.5));
}

TEST_CASE("grid must tile Y exactly at the coarsest layer") {
  CHECK_THROWS_AS(LayerStack({0.0}, {1.0}, {0.3}, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(LayerStack({0.0}, {1.0}, {0.25}, 0.1, 4), ConfigError);
  CHECK_NOTHROW(LayerStack({0.0}, {1.0}, {0.25}, 0.1, 3));
  CHECK_THROWS_AS(LayerStack({0.0}, {1.0}, {0.25}, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(LayerStack({0.0}, {1.0}, {0.25}, 0.1, 0), ConfigError);
  CHECK_THROWS_AS(LayerStack({1.0}, {1.0}, {0.25}, 0.1, 1), ConfigError);
}

TEST_CASE("row-major indexing with the last dimension fastest") {
  const LayerStack s({0.0, 0.0, 0.0}, {2.0, 3.0, 4.0}, {1.0, 1.0, 1.0}, 1.0, 1);
  const MultiIndex k = {1, 2, 3};
  CHECK(s.index_of(1, k) == 1 * 12 + 2 * 4 + 3);
  for (std::size_t c = 0; c < s.num_cells(1); ++c) CHECK(s.index_of(1, s.multi_index(1, c)) == c);
  const Vector center = s.center(1, s.index_of(1, k));
  CHECK(center == Vector{1.5, 2.5, 3.5});
}

TEST_CASE("cell_of uses half-open cells") {
  const LayerStack s = square4(3);
  auto idx = [&](Vector x, int l) { return cell_of(s, x, l); };
  CHECK(idx({0.0, 0.0}, 1)->index == 0);
  CHECK(idx({1.0, 0.5}, 1)->index == 4);  // boundary belongs to the upper cell
  CHECK(idx({3.999, 3.999}, 1)->index == 15);
  CHECK_FALSE(idx({4.0, 1.0}, 1).has_value());
  CHECK_FALSE(idx({-0.001, 1.0}, 1).has_value());
  CHECK(idx({3.5, 1.5}, 2)->index == 2);
  CHECK(idx({3.5, 1.5}, 3)->index == 0);
  CHECK(idx({3.5, 1.5}, 3)->layer == 3);
}

TEST_CASE("cell_of is consistent across layers") {
  const LayerStack s({0.0, 0.0}, {1.0, 0.6}, {0.05, 0.075}, 0.1, 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(0.0, 0.6);
  const auto par2 = oracle::parent_table(s, 1, 2);
  const auto par3 = oracle::parent_table(s, 1, 3);
  for (int k = 0; k < 500; ++k) {
    const Vector x = {ux(rng), uy(rng)};
    const auto c1 = cell_of(s, x, 1);
    REQUIRE(c1);
    CHECK(oracle::box_contains(s, 1, c1->index, x));
    CHECK(cell_of(s, x, 2)->index == par2[c1->index]);
    CHECK(cell_of(s, x, 3)->index == par3[c1->index]);
  }
}

TEST_CASE("cell_of wraps periodic dimensions") {
  const double two_pi = 2.0 * std::numbers::pi;
  const LayerStack s({0.0, 0.0}, {1.0, two_pi}, {0.5, two_pi / 4.0}, 0.1, 1, {false, true});
  CHECK(cell_of(s, Vector{0.2, two_pi + 0.1}, 1)->index == 0);
  CHECK(cell_of(s, Vector{0.2, -0.1}, 1)->index == 3);
  CHECK_FALSE(cell_of(s, Vector{1.2, 0.1}, 1).has_value());
}

TEST_CASE("cells_intersecting") {
  const LayerStack s = square4(1);
  SUBCASE("box inside one cell") {
    const auto r = cells_intersecting(s, Vector{1.2, 2.2}, Vector{1.8, 2.8}, 1);
    CHECK(oracle::to_set(r.cells) == oracle::IndexSet{6});
    CHECK_FALSE(r.escapes);
  }
  SUBCASE("box overlapping four cells") {
    const auto r = cells_intersecting(s, Vector{0.5, 0.5}, Vector{1.5, 1.5}, 1);
    CHECK(oracle::to_set(r.cells) == oracle::IndexSet{0, 1, 4, 5});
  }
  SUBCASE("zero-width face contact does not count") {
    const auto r = cells_intersecting(s, Vector{1.0, 1.0}, Vector{2.0, 2.0}, 1);
    CHECK(oracle::to_set(r.cells) == oracle::IndexSet{5});
  }
  SUBCASE("degenerate box on a face picks the upper cell") {
    const auto r = cells_intersecting(s, Vector{1.0, 1.5}, Vector{1.0, 1.5}, 1);
    CHECK(r.cells.count() == 1);
  }
  SUBCASE("escaping box is clipped and flagged") {
    const auto r = cells_intersecting(s, Vector{3.5, -0.5}, Vector{4.5, 0.5}, 1);
    CHECK(oracle::to_set(r.cells) == oracle::IndexSet{12});
    CHECK(r.escapes);
  }
  SUBCASE("box fully outside") {
    const auto r = cells_intersecting(s, Vector{5.0, 5.0}, Vector{6.0, 6.0}, 1);
    CHECK(r.cells.empty());
    CHECK(r.escapes);
  }
}

TEST_CASE("cells_intersecting wraps around a periodic dimension") {
  const double two_pi = 2.0 * std::numbers::pi;
  const LayerStack s({0.0, 0.0}, {1.0, two_pi}, {0.5, two_pi / 4.0}, 0.1, 1, {false, true});
  const auto r = cells_intersecting(s, Vector{0.1, two_pi - 0.2}, Vector{0.2, two_pi + 0.2}, 1);
  CHECK(oracle::to_set(r.cells) == oracle::IndexSet{0, 3});
  CHECK_FALSE(r.escapes);
}

TEST_CASE("gamma matches the geometric oracle exhaustively on a 4x4 grid") {
  const LayerStack s = square4(3);
  // every layer-1 subset, coarsened to layers 2 and 3
  for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
    CellSet a = s.empty_set(1);
    for (std::size_t c = 0; c < 16; ++c) {
      if (mask >> c & 1u) a.set(c);
    }
    const auto sa = oracle::to_set(a);
    for (int to : {2, 3}) {
      const CellSet g = gamma(s, a, to);
      REQUIRE(g.layer() == to);
      REQUIRE(oracle::to_set(g) == oracle::gamma(s, sa, 1, to));
    }
  }
  // every layer-2 subset, refined and coarsened
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    CellSet a = s.empty_set(2);
    for (std::size_t c = 0; c < 4; ++c) {
      if (mask >> c & 1u) a.set(c);
    }
    for (int to : {1, 2, 3}) CHECK(oracle::to_set(gamma(s, a, to)) == oracle::gamma(s, oracle::to_set(a), 2, to));
  }
  for (bool full : {false, true}) {
    const CellSet a = full ? s.full_set(3) : s.empty_set(3);
    for (int to : {1, 2}) CHECK(oracle::to_set(gamma(s, a, to)) == oracle::gamma(s, oracle::to_set(a), 3, to));
  }
}

TEST_CASE("gamma matches the oracle on uneven 3-d grids") {
  const LayerStack s({0.0, 0.0, 0.0}, {8.0, 4.0, 12.0}, {0.5, 0.5, 0.75}, 0.1, 3);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const int from = 1 + k % 3;
    const CellSet a = random_set(s, from, rng, k < 10 ? 0.5 : 0.95);
    for (int to = 1; to <= 3; ++to) {
      CHECK(oracle::to_set(gamma(s, a, to)) == oracle::gamma(s, oracle::to_set(a), from, to));
    }
  }
}

TEST_CASE("refinement and coarsening form a Galois connection") {
  const LayerStack s({0.0, 0.0}, {16.0, 8.0}, {0.25, 0.25}, 0.1, 4);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const int lc = 2 + k % 3;
    const CellSet a = random_set(s, lc, rng, 0.3);
    const CellSet b = random_set(s, 1, rng, 0.8);
    CHECK(gamma(s, a, 1).subset_of(b) == a.subset_of(gamma(s, b, lc)));
    CHECK(gamma(s, gamma(s, a, 1), lc) == a);
    CHECK(gamma(s, gamma(s, b, lc), 1).subset_of(b));
    CHECK(gamma(s, gamma(s, b, 2), 4) == gamma(s, b, 4));
    CHECK(gamma(s, b, 1) == b);
    CHECK(coarsen_one(s, b) == gamma(s, b, 2));
    CHECK(refine_one(s, a) == gamma(s, a, lc - 1));
    // monotone
    const CellSet b2 = b | random_set(s, 1, rng, 0.5);
    CHECK(gamma(s, b, lc).subset_of(gamma(s, b2, lc)));
  }
}

TEST_CASE("cell set algebra") {
  CellSet a(1, 130), b(1, 130);
  a.set(0);
  a.set(64);
  a.set(129);
  b.set(64);
  b.set(100);
  CHECK((a | b).count() == 4);
  CHECK((a & b).indices() == std::vector<std::size_t>{64});
  CHECK((a - b).indices() == std::vector<std::size_t>{0, 129});
  CHECK((a & b).subset_of(a));
  CHECK_FALSE(a.subset_of(b));
  CHECK(CellSet::full(1, 130).count() == 130);
  CHECK_THROWS_AS(a |= CellSet(2, 130), std::invalid_argument);
  CHECK_THROWS_AS(a &= CellSet(1, 131), std::invalid_argument);
}
