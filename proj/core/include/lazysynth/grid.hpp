#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lazysynth/cell_set.hpp"
#include "lazysynth/dynamics.hpp"

namespace lazysynth {

using MultiIndex = std::vector<std::int64_t>;

/* Geometry of one layer. */
struct LayerGrid {
  Vector eta;
  double tau = 0.0;
  MultiIndex counts;
  /* row-major: the last dimension varies fastest */
  std::vector<std::size_t> strides;
  std::size_t num_cells = 0;
};

/*
 * class: LayerStack
 *
 * L nested grid covers of the box Y = [alpha, beta]. Layer 1 is the finest;
 * eta and tau double from one layer to the next, so every layer-l cell is the
 * union of 2^n layer-(l-1) cells. Layers are numbered 1..L.
 */
class LayerStack {
public:
  LayerStack() = default;
  /* throws ConfigError if Y is not tiled exactly by the coarsest layer */
  LayerStack(Vector alpha, Vector beta, Vector eta1, double tau1, int num_layers,
             std::vector<bool> periodic = {});

  std::size_t dim() const { return alpha_.size(); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const Vector& alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }
  const Vector& eta1() const { return layers_.front().eta; }
  double tau1() const { return layers_.front().tau; }
  bool periodic(std::size_t i) const { return !periodic_.empty() && periodic_[i]; }
  const std::vector<bool>& periodic_flags() const { return periodic_; }

  const LayerGrid& layer(int l) const { return layers_.at(static_cast<std::size_t>(l - 1)); }
  double tau(int l) const { return layer(l).tau; }
  std::size_t num_cells(int l) const { return layer(l).num_cells; }

  std::size_t index_of(int l, std::span<const std::int64_t> k) const;
  MultiIndex multi_index(int l, std::size_t index) const;
  Vector center(int l, std::size_t index) const;
  Vector half_width(int l) const;
  /* volume of one layer-l cell */
  double cell_volume(int l) const;

  CellSet empty_set(int l) const { return CellSet(l, num_cells(l)); }
  CellSet full_set(int l) const { return CellSet::full(l, num_cells(l)); }

private:
  Vector alpha_, beta_;
  std::vector<bool> periodic_;
  std::vector<LayerGrid> layers_;
};

struct CellId {
  int layer = 0;
  std::size_t index = 0;

  bool operator==(const CellId&) const = default;
};

/* Layer-l cell whose half-open box [c - eta/2, c + eta/2) contains x, or
 * nullopt if x is outside [alpha, beta). Periodic components are wrapped
 * into Y first. The coarse index is derived from the finest one so that
 * the answer is consistent across layers. */
std::optional<CellId> cell_of(const LayerStack& stack, std::span<const double> x, int l);

struct Intersection {
  CellSet cells;
  bool escapes = false;
};

/* Layer-l cells whose closed box meets the closed box [lower, upper] with
 * positive overlap, and whether the box leaves Y. Contact along a shared face
 * of zero width (up to 1e-10 cell widths) does not count. */
Intersection cells_intersecting(const LayerStack& stack, std::span<const double> lower,
                                std::span<const double> upper, int l);

/* Same as above, appending sorted cell indices to `out`. Returns escapes. */
bool append_cells_intersecting(const LayerStack& stack, std::span<const double> lower,
                               std::span<const double> upper, int l,
                               std::vector<std::uint32_t>& out);

/* Inter-layer transformer. Moving to a finer layer expands every cell into
 * all of its subcells; moving to a coarser layer keeps a cell iff all of its
 * subcells are in `s` (under-approximation). */
CellSet gamma(const LayerStack& stack, const CellSet& s, int target_layer);

/* One-layer steps of gamma: layer l to l-1 and layer l to l+1. */
CellSet refine_one(const LayerStack& stack, const CellSet& s);
CellSet coarsen_one(const LayerStack& stack, const CellSet& s);

}  // namespace lazysynth
