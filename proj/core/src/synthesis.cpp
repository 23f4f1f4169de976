#include "lazysynth/synthesis.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

#include "lazysynth/errors.hpp"

namespace lazysynth {

MultiController::MultiController(const LayerStack& stack) {
  for (int l = 1; l <= stack.num_layers(); ++l) {
    domains_.push_back(stack.empty_set(l));
    choice_.emplace_back(stack.num_cells(l), -1);
  }
}

std::optional<std::size_t> MultiController::input(int l, std::size_t cell) const {
  const auto& c = choice_.at(static_cast<std::size_t>(l - 1));
  if (cell >= c.size() || c[cell] < 0) return std::nullopt;
  return static_cast<std::size_t>(c[cell]);
}

void MultiController::assign(int l, std::size_t cell, std::size_t input) {
  const auto li = static_cast<std::size_t>(l - 1);
  domains_.at(li).set(cell);
  choice_.at(li).at(cell) = static_cast<std::int32_t>(input);
}

std::size_t MultiController::total_cells() const {
  std::size_t n = 0;
  for (const auto& d : domains_) n += d.count();
  return n;
}

double SynthesisResult::explore_seconds() const {
  double s = 0.0;
  for (const auto& l : stats.layers) s += l.explore_seconds;
  return s;
}

namespace {

bool certifies(const TransitionCache& cache, int l, std::size_t cell, std::size_t u,
               const CellSet& target) {
  const auto v = cache.view(l, cell, u);
  if (!v || v->leaves_y || v->successors.empty()) return false;
  for (auto s : v->successors) {
    if (!target.test(s)) return false;
  }
  return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::optional<std::size_t> first_valid_input(const TransitionCache& cache, int l,
                                             std::size_t cell, const CellSet& target) {
  for (std::size_t u = 0; u < cache.num_inputs(); ++u) {
    if (certifies(cache, l, cell, u, target)) return u;
  }
  return std::nullopt;
}

CellSet cpre(const TransitionCache& cache, const CellSet& target, const CellSet& candidates) {
  const int l = target.layer();
  if (candidates.layer() != l) throw PreconditionError("cpre: candidates on another layer");
  CellSet out = cache.stack().empty_set(l);
  candidates.for_each([&](std::size_t c) {
    if (first_valid_input(cache, l, c, target)) out.set(c);
  });
  return out;
}

CellSet cpre(const TransitionCache& cache, const CellSet& target) {
  return cpre(cache, target, cache.stack().full_set(target.layer()));
}

SingleLayerResult single_layer_safe(TransitionCache& cache, const TransitionSource& source,
                                    const CellSet& safe_l) {
  const int l = safe_l.layer();
  cache.explore(source, safe_l);
  SingleLayerResult res;
  CellSet w = safe_l;
  while (true) {
    ++res.iterations;
    CellSet next = cpre(cache, w, w);  // CPre(W) & T with W inside T
    if (next == w) break;
    w = std::move(next);
  }
  res.controller = MultiController(cache.stack());
  w.for_each([&](std::size_t c) {
    const auto u = first_valid_input(cache, l, c, w);
    if (!u) throw std::logic_error("single_layer_safe: fixpoint cell without valid input");
    res.controller.assign(l, c, *u);
  });
  res.winning = std::move(w);
  return res;
}

SynthesisResult safe_iteration(ExplorationMode mode, TransitionCache& cache,
                               const TransitionSource& source, const CellSet& safe_1,
                               const SynthesisOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const LayerStack& stack = cache.stack();
  if (safe_1.layer() != 1 || safe_1.size() != stack.num_cells(1)) {
    throw PreconditionError("safe_iteration: safe set must be a layer-1 set of this stack");
  }
  const int num_layers = stack.num_layers();

  SynthesisResult res;
  std::vector<CellSet> w_sets(static_cast<std::size_t>(num_layers));
  std::vector<CellSet> lifted(static_cast<std::size_t>(num_layers));
  CellSet upsilon = safe_1;
  std::size_t iteration = 0;
  auto at = [](std::vector<CellSet>& v, int l) -> CellSet& { return v[static_cast<std::size_t>(l - 1)]; };

  while (true) {
    ++iteration;
    // Gamma_{l1}(upsilon) for every layer, one coarsening step at a time
    at(lifted, 1) = upsilon;
    for (int l = 2; l <= num_layers; ++l) at(lifted, l) = coarsen_one(stack, at(lifted, l - 1));

    // `covered` is Gamma_{l1}(upsilon') on the current layer. Before layer l
    // is processed upsilon' is a union of coarser cells, so lifting it is a
    // plain refinement of the coarser W's.
    CellSet covered = stack.empty_set(num_layers);
    for (int l = num_layers; l >= 1; --l) {
      if (l < num_layers) covered = refine_one(stack, covered | at(w_sets, l + 1));
      const CellSet& lift = at(lifted, l);
      if (mode == ExplorationMode::lazy) cache.explore(source, lift - covered);
      CellSet w = cpre(cache, lift, lift & cache.explored_cells(l));
      res.trace.push_back({iteration, l, w.count()});
      if (options.record_sets) {
        res.sets.push_back({iteration, l, w, gamma(stack, covered | w, 1)});
      }
      at(w_sets, l) = std::move(w);
    }
    CellSet upsilon_prime = covered | at(w_sets, 1);

    if (!upsilon_prime.subset_of(upsilon)) {
      throw PropertyViolation("monotonicity violated: layer-1 safe set grew in iteration " +
                              std::to_string(iteration));
    }
    if (upsilon_prime == upsilon) break;
    upsilon = std::move(upsilon_prime);
  }

  res.controller = extract_controller(cache, upsilon, w_sets);
  res.winning = std::move(upsilon);
  res.fixpoint_sets = std::move(w_sets);
  res.stats = cache.stats();
  res.stats.iterations = iteration;
  res.total_seconds = seconds_since(t0);
  return res;
}

SynthesisResult eager_safe(TransitionCache& cache, const TransitionSource& source,
                           const CellSet& safe_1, const SynthesisOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int l = 1; l <= cache.stack().num_layers(); ++l) {
    cache.explore(source, gamma(cache.stack(), safe_1, l));
  }
  SynthesisResult res = safe_iteration(ExplorationMode::eager, cache, source, safe_1, options);
  res.total_seconds = seconds_since(t0);
  return res;
}

SynthesisResult lazy_safe(TransitionCache& cache, const TransitionSource& source,
                          const CellSet& safe_1, const SynthesisOptions& options) {
  return safe_iteration(ExplorationMode::lazy, cache, source, safe_1, options);
}

namespace {

SynthesisResult run_problem(ExplorationMode mode, const SafetyProblem& problem,
                            const SynthesisOptions& options, unsigned threads) {
  problem.validate();
  ReachTransitionSource source(problem.system, problem.stack, problem.substeps);
  TransitionCache cache(problem.stack, problem.system.num_inputs());
  cache.set_threads(threads);
  const CellSet safe_1 = safe_cells(problem.stack, problem.safe, 1);
  return mode == ExplorationMode::lazy ? lazy_safe(cache, source, safe_1, options)
                                       : eager_safe(cache, source, safe_1, options);
}

}  // namespace

SynthesisResult eager_safe(const SafetyProblem& problem, const SynthesisOptions& options,
                           unsigned threads) {
  return run_problem(ExplorationMode::eager, problem, options, threads);
}

SynthesisResult lazy_safe(const SafetyProblem& problem, const SynthesisOptions& options,
                          unsigned threads) {
  return run_problem(ExplorationMode::lazy, problem, options, threads);
}

MultiController extract_controller(const TransitionCache& cache, const CellSet& winning,
                                   const std::vector<CellSet>& fixpoint_sets) {
  const LayerStack& stack = cache.stack();
  const int num_layers = stack.num_layers();
  if (static_cast<int>(fixpoint_sets.size()) != num_layers) {
    throw PreconditionError("extract_controller: need one fixpoint set per layer");
  }
  MultiController ctrl(stack);
  CellSet shadowed = stack.empty_set(num_layers);  // coarser W's, lifted to layer l
  for (int l = num_layers; l >= 1; --l) {
    if (l < num_layers) shadowed = refine_one(stack, shadowed | fixpoint_sets[static_cast<std::size_t>(l)]);
    const CellSet& w = fixpoint_sets[static_cast<std::size_t>(l - 1)];
    const CellSet target = gamma(stack, winning, l);
    (w - shadowed).for_each([&](std::size_t c) {
      const auto u = first_valid_input(cache, l, c, target);
      if (!u) {
        throw std::logic_error("extract_controller: no valid input for layer " +
                               std::to_string(l) + " cell " + std::to_string(c));
      }
      ctrl.assign(l, c, *u);
    });
  }
  return ctrl;
}

void validate_controller(const TransitionCache& cache, const MultiController& controller,
                         const CellSet& winning, const CellSet& safe_1) {
  const LayerStack& stack = cache.stack();
  CellSet union_1 = stack.empty_set(1);
  for (int l = 1; l <= stack.num_layers(); ++l) {
    const CellSet target = gamma(stack, winning, l);
    const CellSet safe_l = gamma(stack, safe_1, l);
    const CellSet& dom = controller.domain(l);
    if (!dom.subset_of(safe_l)) {
      throw PropertyViolation("controller domain of layer " + std::to_string(l) +
                              " leaves the safe cells");
    }
    dom.for_each([&](std::size_t c) {
      const auto u = controller.input(l, c);
      if (!u || !certifies(cache, l, c, *u, target)) {
        throw PropertyViolation("controller input of layer " + std::to_string(l) + " cell " +
                                std::to_string(c) + " does not keep the state winning");
      }
    });
    union_1 |= gamma(stack, dom, 1);
  }
  if (!(union_1 == winning)) {
    throw PropertyViolation("controller domains do not cover exactly the winning set");
  }
}

}  // namespace lazysynth
