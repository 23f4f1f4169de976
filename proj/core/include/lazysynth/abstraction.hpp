#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lazysynth/cell_set.hpp"
#include "lazysynth/dynamics.hpp"
#include "lazysynth/grid.hpp"

namespace lazysynth {

/*
 * class: TransitionSource
 *
 * Computes the abstract successors of one (layer, cell, input) triple.
 * Implementations must be safe to call concurrently.
 */
class TransitionSource {
public:
  virtual ~TransitionSource() = default;
  virtual std::size_t num_inputs() const = 0;
  /* appends sorted successor indices (inside Y) to `successors`; returns the
   * leaves-Y flag */
  virtual bool compute(int layer, std::size_t cell, std::size_t input,
                       std::vector<std::uint32_t>& successors) const = 0;
};

/* Transitions of the sampled continuous system: growth-bound reach box of
 * the cell, intersected with the layer grid. */
class ReachTransitionSource final : public TransitionSource {
public:
  ReachTransitionSource(const ControlSystem& sys, const LayerStack& stack, int substeps)
      : sys_(sys), stack_(stack), substeps_(substeps) {}

  std::size_t num_inputs() const override { return sys_.num_inputs(); }
  bool compute(int layer, std::size_t cell, std::size_t input,
               std::vector<std::uint32_t>& successors) const override;

private:
  const ControlSystem& sys_;
  const LayerStack& stack_;
  int substeps_;
};

/* Finite abstract system given as explicit tables, one per layer, indexed
 * [cell * num_inputs + input]. */
class ExplicitTransitionSource final : public TransitionSource {
public:
  struct Entry {
    std::vector<std::uint32_t> successors;
    bool leaves_y = false;
  };

  ExplicitTransitionSource(std::size_t num_inputs, std::vector<std::vector<Entry>> per_layer)
      : num_inputs_(num_inputs), tables_(std::move(per_layer)) {}

  std::size_t num_inputs() const override { return num_inputs_; }
  bool compute(int layer, std::size_t cell, std::size_t input,
               std::vector<std::uint32_t>& successors) const override;

  const Entry& entry(int layer, std::size_t cell, std::size_t input) const {
    return tables_.at(static_cast<std::size_t>(layer - 1)).at(cell * num_inputs_ + input);
  }

private:
  std::size_t num_inputs_;
  std::vector<std::vector<Entry>> tables_;
};

struct LayerExplorationStats {
  std::size_t computed_pairs = 0;
  double explore_seconds = 0.0;
};

struct ExplorationStats {
  std::vector<LayerExplorationStats> layers;  // index l-1
  std::size_t iterations = 0;
};

/* Read-only view of one computed transition. */
struct TransitionView {
  std::span<const std::uint32_t> successors;
  bool leaves_y = false;
};

struct SuccessorSet {
  CellSet cells;
  bool leaves_y = false;
};

/*
 * class: TransitionCache
 *
 * Lazily filled abstract transition functions of all layers. Every
 * (layer, cell, input) entry is either unexplored or computed; a computed
 * entry is written exactly once. Successor lists live in one pool per layer
 * and are appended in increasing (cell, input) order within an exploration
 * batch, so the cache contents do not depend on the worker count.
 */
class TransitionCache {
public:
  TransitionCache(const LayerStack& stack, std::size_t num_inputs);

  const LayerStack& stack() const { return *stack_; }
  std::size_t num_inputs() const { return num_inputs_; }

  /* worker threads used by explore(); 0 picks the hardware concurrency */
  void set_threads(unsigned threads) { threads_ = threads; }
  unsigned threads() const { return threads_; }

  bool computed(int l, std::size_t cell, std::size_t input) const {
    return table(l).tag[cell * num_inputs_ + input] != kUnexplored;
  }

  /* pure lookup, never computes */
  std::optional<TransitionView> view(int l, std::size_t cell, std::size_t input) const;
  std::optional<SuccessorSet> successors(const CellId& cell, std::size_t input) const;

  /* Computes every unexplored (cell, input) pair with cell in `cells`.
   * Returns the number of newly computed pairs. Exceptions thrown by the
   * source are rethrown after all workers joined; the cache keeps only the
   * entries of batches that finished before the failing one. */
  std::size_t explore(const TransitionSource& source, const CellSet& cells);

  std::size_t computed_pairs(int l) const { return stats_.layers.at(static_cast<std::size_t>(l - 1)).computed_pairs; }
  /* cells with at least one computed input */
  const CellSet& explored_cells(int l) const { return explored_[static_cast<std::size_t>(l - 1)]; }

  const ExplorationStats& stats() const { return stats_; }
  ExplorationStats& stats() { return stats_; }

  /* one line per computed entry: layer cell input successors leaves_y */
  void dump(std::ostream& os) const;

private:
  static constexpr std::uint8_t kUnexplored = 0;
  static constexpr std::uint8_t kComputed = 1;
  static constexpr std::uint8_t kComputedLeaves = 2;

  struct LayerTable {
    std::vector<std::uint8_t> tag;
    std::vector<std::uint64_t> offset;
    std::vector<std::uint32_t> length;
    std::vector<std::uint32_t> pool;
  };

  const LayerTable& table(int l) const { return tables_[static_cast<std::size_t>(l - 1)]; }
  LayerTable& table(int l) { return tables_[static_cast<std::size_t>(l - 1)]; }

  const LayerStack* stack_;
  std::size_t num_inputs_;
  unsigned threads_ = 1;
  std::vector<LayerTable> tables_;
  std::vector<CellSet> explored_;
  ExplorationStats stats_;
};

}  // namespace lazysynth
