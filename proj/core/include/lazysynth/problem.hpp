#pragma once

#include <span>
#include <vector>

#include "lazysynth/cell_set.hpp"
#include "lazysynth/dynamics.hpp"
#include "lazysynth/grid.hpp"

namespace lazysynth {

struct Box {
  Vector lower;
  Vector upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  /* open interior */
  bool interior_contains(std::span<const double> x) const;
};

/* T = box minus the open interiors of the obstacles. */
struct SafeSet {
  Box box;
  std::vector<Box> obstacles;

  /* x is wrapped into Y along periodic dimensions before the test */
  bool contains(const LayerStack& stack, std::span<const double> x) const;
};

/* Under-approximation {cells c of layer l : c subset of T}. */
CellSet safe_cells(const LayerStack& stack, const SafeSet& safe, int l);

/* true iff every bound of the box and of every obstacle lies on a layer-1
 * grid line, i.e. T is exactly the union of its layer-1 cells */
bool grid_aligned(const LayerStack& stack, const SafeSet& safe);

struct SafetyProblem {
  ControlSystem system;
  LayerStack stack;
  SafeSet safe;
  int substeps = 10;

  /* throws ConfigError; checks the system, the grid, T inside Y and the
   * periodic dimensions (period must equal the width of Y) */
  void validate() const;
};

}  // namespace lazysynth
