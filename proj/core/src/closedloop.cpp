#include "lazysynth/closedloop.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include "lazysynth/errors.hpp"

namespace lazysynth {

std::optional<CellId> QuantizerView::quantize(std::span<const double> x) const {
  for (int l = stack_->num_layers(); l >= 1; --l) {
    const auto cell = cell_of(*stack_, x, l);
    if (!cell) return std::nullopt;  // outside Y on every layer
    if (controller_->domain(l).test(cell->index)) return cell;
  }
  return std::nullopt;
}

StepResult step(const QuantizerView& view, const ControlSystem& sys, std::span<const double> x,
                std::mt19937_64& rng, int substeps) {
  const auto cell = view.quantize(x);
  if (!cell) {
    throw PreconditionError("step: state " + format_vector(x) + " is not in the controller domain");
  }
  const std::size_t u = *view.controller().input(cell->layer, cell->index);
  const double tau = view.stack().tau(cell->layer);

  const std::size_t n = sys.dim;
  std::vector<double> w(n * static_cast<std::size_t>(substeps));
  for (int s = 0; s < substeps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double bound = sys.disturbance[i];
      w[static_cast<std::size_t>(s) * n + i] =
          bound > 0.0 ? std::uniform_real_distribution<double>(-bound, bound)(rng) : 0.0;
    }
  }
  StepResult r{integrate_perturbed(sys, x, u, tau, substeps, w), cell->layer, u};
  if (!view.quantize(r.state)) {
    throw PropertyViolation("left controller domain: " + format_vector(x) + " -> " +
                            format_vector(r.state) + " under layer " +
                            std::to_string(cell->layer) + " input " + std::to_string(u));
  }
  return r;
}

StepResult step(const QuantizerView& view, const ControlSystem& sys, std::span<const double> x,
                std::uint64_t seed, int substeps) {
  std::mt19937_64 rng(seed);
  return step(view, sys, x, rng, substeps);
}

Simulation simulate(const QuantizerView& view, const ControlSystem& sys, const SafeSet& safe,
                    std::span<const double> x0, std::size_t num_steps, std::uint64_t seed,
                    int substeps) {
  if (!view.quantize(x0)) {
    throw PreconditionError("simulate: initial state " + format_vector(x0) +
                            " is not in the controller domain");
  }
  std::mt19937_64 rng(seed);
  Simulation sim;
  auto& samples = sim.trajectory.samples;
  samples.push_back({0.0, Vector(x0.begin(), x0.end()), 0, -1});
  auto check_safe = [&](const Vector& x) {
    if (!safe.contains(view.stack(), x)) {
      ++sim.verdict.violations;
      sim.verdict.safe = false;
      if (sim.verdict.message.empty()) sim.verdict.message = "state " + format_vector(x) + " outside T";
    }
  };
  check_safe(samples.back().state);

  for (std::size_t k = 0; k < num_steps; ++k) {
    TrajectorySample& cur = samples.back();
    const auto cell = view.quantize(cur.state);
    cur.layer = cell->layer;
    cur.input = static_cast<int>(*view.controller().input(cell->layer, cell->index));
    const double t_next = cur.time + view.stack().tau(cell->layer);
    const Vector x = cur.state;
    try {
      StepResult r = step(view, sys, x, rng, substeps);
      samples.push_back({t_next, std::move(r.state), 0, -1});
      check_safe(samples.back().state);
    } catch (const PropertyViolation& e) {
      sim.verdict.safe = false;
      sim.verdict.domain_exit = true;
      if (sim.verdict.message.empty()) sim.verdict.message = e.what();
      break;
    } catch (const NumericalError& e) {
      sim.verdict.safe = false;
      if (sim.verdict.message.empty()) sim.verdict.message = e.what();
      break;
    }
  }
  return sim;
}

Vector sample_winning_state(const LayerStack& stack, const CellSet& winning, std::mt19937_64& rng) {
  const std::size_t total = winning.count();
  if (total == 0) throw PreconditionError("nothing to simulate: the controller domain is empty");
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
  std::size_t chosen = 0;
  for (const auto& idx : winning.indices()) {
    if (pick-- == 0) {
      chosen = idx;
      break;
    }
  }
  const Vector c = stack.center(1, chosen);
  const Vector h = stack.half_width(1);
  Vector x(c.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    // half-open cell
    double v = std::uniform_real_distribution<double>(c[i] - h[i], c[i] + h[i])(rng);
    if (v >= c[i] + h[i]) v = c[i] - h[i];
    x[i] = v;
  }
  return x;
}

BatchSummary simulate_batch(const QuantizerView& view, const SafetyProblem& problem,
                            std::size_t count, std::size_t steps, std::uint64_t seed,
                            unsigned threads, std::size_t keep_trajectories) {
  const LayerStack& stack = view.stack();
  CellSet winning = stack.empty_set(1);
  for (int l = 1; l <= stack.num_layers(); ++l) winning |= gamma(stack, view.controller().domain(l), 1);
  if (winning.empty()) throw PreconditionError("nothing to simulate: the controller domain is empty");
  const std::vector<std::size_t> cells = winning.indices();

  struct Rollout {
    Simulation sim;
  };
  std::vector<Rollout> rollouts(count);
  auto run = [&](std::size_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t chosen = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
    const Vector c = stack.center(1, chosen);
    const Vector h = stack.half_width(1);
    Vector x0(c.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
      double v = std::uniform_real_distribution<double>(c[i] - h[i], c[i] + h[i])(rng);
      if (v >= c[i] + h[i]) v = c[i] - h[i];
      x0[i] = v;
    }
    rollouts[k].sim = simulate(view, problem.system, problem.safe, x0, steps, rng(), problem.substeps);
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < count; k += workers) run(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  BatchSummary sum;
  sum.rollouts = count;
  sum.steps_per_rollout = steps;
  sum.layer_usage.assign(static_cast<std::size_t>(stack.num_layers()), 0);
  for (std::size_t k = 0; k < count; ++k) {
    const Simulation& s = rollouts[k].sim;
    if (!s.verdict.safe) ++sum.unsafe_rollouts;
    sum.violations += s.verdict.violations;
    if (s.verdict.domain_exit) ++sum.domain_exits;
    if (!s.verdict.safe && sum.failures.size() < 5) {
      sum.failures.push_back("rollout " + std::to_string(k) + ": " + s.verdict.message);
    }
    for (const auto& smp : s.trajectory.samples) {
      if (smp.layer > 0) ++sum.layer_usage[static_cast<std::size_t>(smp.layer - 1)];
    }
    if (k < keep_trajectories) sum.trajectories.push_back(s.trajectory);
  }
  return sum;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().state.size();
  os << "time";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i;
  os << ",layer,input\n";
  os.precision(17);
  for (const auto& s : traj.samples) {
    os << s.time;
    for (double v : s.state) os << ',' << v;
    os << ',' << s.layer << ',' << s.input << '\n';
  }
}

}  // namespace lazysynth
