#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lazysynth/dynamics.hpp"
#include "lazysynth/grid.hpp"
#include "lazysynth/problem.hpp"
#include "lazysynth/synthesis.hpp"

namespace lazysynth {

/* Quantizer induced by a multi-layered controller: maps a state to the
 * coarsest layer whose controller domain holds the cell containing it. */
class QuantizerView {
public:
  QuantizerView(const MultiController& controller, const LayerStack& stack)
      : controller_(&controller), stack_(&stack) {}

  std::optional<CellId> quantize(std::span<const double> x) const;

  const MultiController& controller() const { return *controller_; }
  const LayerStack& stack() const { return *stack_; }

private:
  const MultiController* controller_;
  const LayerStack* stack_;
};

struct TrajectorySample {
  double time = 0.0;
  Vector state;
  int layer = 0;   // 0 when no input was applied from this state
  int input = -1;  // -1 when no input was applied from this state
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
};

struct StepResult {
  Vector state;
  int layer = 0;
  std::size_t input = 0;
};

/* One closed-loop step: quantize, apply the chosen input for tau_l with a
 * piecewise-constant disturbance drawn uniformly from W at every substep.
 * Throws PreconditionError if x is outside the domain and PropertyViolation
 * ("left controller domain") if the successor is. */
StepResult step(const QuantizerView& view, const ControlSystem& sys, std::span<const double> x,
                std::mt19937_64& rng, int substeps);
StepResult step(const QuantizerView& view, const ControlSystem& sys, std::span<const double> x,
                std::uint64_t seed, int substeps);

struct Verdict {
  bool safe = true;
  std::size_t violations = 0;  // sampled states outside T
  bool domain_exit = false;
  std::string message;
};

struct Simulation {
  Trajectory trajectory;
  Verdict verdict;
};

/* Rolls `num_steps` steps from x0. Failures are recorded in the verdict. */
Simulation simulate(const QuantizerView& view, const ControlSystem& sys, const SafeSet& safe,
                    std::span<const double> x0, std::size_t num_steps, std::uint64_t seed,
                    int substeps);

struct BatchSummary {
  std::size_t rollouts = 0;
  std::size_t steps_per_rollout = 0;
  std::size_t unsafe_rollouts = 0;
  std::size_t violations = 0;
  std::size_t domain_exits = 0;
  std::vector<std::size_t> layer_usage;  // index l-1, number of steps using layer l
  std::vector<std::string> failures;     // first few messages
  std::vector<Trajectory> trajectories;  // only if requested
};

/* Uniform point of the layer-1 winning set. */
Vector sample_winning_state(const LayerStack& stack, const CellSet& winning, std::mt19937_64& rng);

/* Independent rollouts from uniformly sampled states of the controller
 * domain; rollout k uses its own generator seeded from (seed, k). Throws
 * PreconditionError if the domain is empty. */
BatchSummary simulate_batch(const QuantizerView& view, const SafetyProblem& problem,
                            std::size_t count, std::size_t steps, std::uint64_t seed,
                            unsigned threads = 1, std::size_t keep_trajectories = 0);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lazysynth
