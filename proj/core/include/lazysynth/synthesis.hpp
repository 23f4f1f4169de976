#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lazysynth/abstraction.hpp"
#include "lazysynth/cell_set.hpp"
#include "lazysynth/grid.hpp"
#include "lazysynth/problem.hpp"

namespace lazysynth {

enum class ExplorationMode { eager, lazy };

/*
 * class: MultiController
 *
 * One deterministic controller per layer: a domain and, for each domain
 * cell, the index of the input to apply. Layers are numbered 1..L.
 */
class MultiController {
public:
  MultiController() = default;
  explicit MultiController(const LayerStack& stack);

  int num_layers() const { return static_cast<int>(domains_.size()); }
  const CellSet& domain(int l) const { return domains_.at(static_cast<std::size_t>(l - 1)); }
  std::optional<std::size_t> input(int l, std::size_t cell) const;

  void assign(int l, std::size_t cell, std::size_t input);

  std::size_t total_cells() const;
  bool operator==(const MultiController& o) const = default;

private:
  std::vector<CellSet> domains_;
  std::vector<std::vector<std::int32_t>> choice_;  // -1 outside the domain
};

struct IterationRecord {
  std::size_t iteration = 0;
  int layer = 0;
  std::size_t w_count = 0;

  bool operator==(const IterationRecord&) const = default;
};

/* Full sets of one (iteration, layer) step, kept only on request. */
struct IterationSets {
  std::size_t iteration = 0;
  int layer = 0;
  CellSet w;              // layer l
  CellSet upsilon_prime;  // layer 1, after the update of this step
};

struct SynthesisOptions {
  bool record_sets = false;
};

struct SynthesisResult {
  CellSet winning;  // layer 1
  MultiController controller;
  /* W_l of the last iteration, before cells shadowed by coarser layers are
   * dropped from the controller domains */
  std::vector<CellSet> fixpoint_sets;
  ExplorationStats stats;
  std::vector<IterationRecord> trace;
  std::vector<IterationSets> sets;
  double total_seconds = 0.0;

  double explore_seconds() const;
  double synthesis_seconds() const { return total_seconds - explore_seconds(); }
};

/* Controllable predecessor on the layer of `target`: cells c in `candidates`
 * with some input whose transition is computed, does not leave Y, has at
 * least one successor and has all successors in `target`. */
CellSet cpre(const TransitionCache& cache, const CellSet& target, const CellSet& candidates);
/* same, candidates = every cell of the layer */
CellSet cpre(const TransitionCache& cache, const CellSet& target);

/* Lowest input index certifying `cell` for `target`, if any. */
std::optional<std::size_t> first_valid_input(const TransitionCache& cache, int l,
                                             std::size_t cell, const CellSet& target);

struct SingleLayerResult {
  CellSet winning;  // layer l
  MultiController controller;
  std::size_t iterations = 0;
};

/* Classical safety fixpoint W0 = T_l, W(i+1) = CPre(W(i)) & T_l on one
 * layer. Explores T_l first. */
SingleLayerResult single_layer_safe(TransitionCache& cache, const TransitionSource& source,
                                    const CellSet& safe_l);

/* Interleaved multi-layer safety fixpoint over all layers of the cache's
 * stack, starting from the layer-1 safe cells. In lazy mode transitions are
 * explored on demand; in eager mode they must already be present (missing
 * ones simply fail CPre). Throws PropertyViolation if the layer-1 sets stop
 * shrinking. */
SynthesisResult safe_iteration(ExplorationMode mode, TransitionCache& cache,
                               const TransitionSource& source, const CellSet& safe_1,
                               const SynthesisOptions& options = {});

/* Explore every layer's safe cells up front, then run the fixpoint. */
SynthesisResult eager_safe(TransitionCache& cache, const TransitionSource& source,
                           const CellSet& safe_1, const SynthesisOptions& options = {});
SynthesisResult lazy_safe(TransitionCache& cache, const TransitionSource& source,
                          const CellSet& safe_1, const SynthesisOptions& options = {});

/* Convenience wrappers building the transition source and cache. */
SynthesisResult eager_safe(const SafetyProblem& problem, const SynthesisOptions& options = {},
                           unsigned threads = 1);
SynthesisResult lazy_safe(const SafetyProblem& problem, const SynthesisOptions& options = {},
                          unsigned threads = 1);

/* Picks the lowest valid input for every cell of the quantizer-effective
 * domains: W_l minus the layer-l cells already covered by coarser W's.
 * Throws std::logic_error if a domain cell has no valid input. */
MultiController extract_controller(const TransitionCache& cache, const CellSet& winning,
                                   const std::vector<CellSet>& fixpoint_sets);

/* Checks the controller invariants against the cache: every domain cell's
 * chosen transition is computed, stays in Y and lands in the winning set
 * lifted to its layer; domains lie in the safe cells; and the union of
 * the domains equals `winning`. Throws PropertyViolation. */
void validate_controller(const TransitionCache& cache, const MultiController& controller,
                         const CellSet& winning, const CellSet& safe_1);

}  // namespace lazysynth
