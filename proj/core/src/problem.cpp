#include "lazysynth/problem.hpp"

#include <cmath>
#include <string>

#include "lazysynth/errors.hpp"

namespace lazysynth {

namespace {

constexpr double kAlignTolerance = 1e-9;  // in units of layer-1 cell width

double wrap_into(double v, double a, double b) {
  v = a + std::fmod(v - a, b - a);
  if (v < a) v += b - a;
  return v;
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

bool Box::interior_contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  }
  return true;
}

bool SafeSet::contains(const LayerStack& stack, std::span<const double> x) const {
  Vector y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (stack.periodic(i)) y[i] = wrap_into(y[i], stack.alpha()[i], stack.beta()[i]);
  }
  if (!box.contains(y)) return false;
  for (const auto& o : obstacles) {
    if (o.interior_contains(y)) return false;
  }
  return true;
}

CellSet safe_cells(const LayerStack& stack, const SafeSet& safe, int l) {
  const std::size_t n = stack.dim();
  const LayerGrid& g = stack.layer(l);
  CellSet out = stack.empty_set(l);
  Vector lo(n), hi(n);
  for (std::size_t c = 0; c < g.num_cells; ++c) {
    const MultiIndex k = stack.multi_index(l, c);
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = stack.alpha()[i] + static_cast<double>(k[i]) * g.eta[i];
      hi[i] = lo[i] + g.eta[i];
      const double tol = kAlignTolerance * g.eta[i];
      if (lo[i] < safe.box.lower[i] - tol || hi[i] > safe.box.upper[i] + tol) inside = false;
    }
    if (!inside) continue;
    for (const auto& o : safe.obstacles) {
      bool overlaps = true;
      for (std::size_t i = 0; i < n; ++i) {
        const double tol = kAlignTolerance * g.eta[i];
        if (hi[i] <= o.lower[i] + tol || lo[i] >= o.upper[i] - tol) {
          overlaps = false;
          break;
        }
      }
      if (overlaps) {
        inside = false;
        break;
      }
    }
    if (inside) out.set(c);
  }
  return out;
}

bool grid_aligned(const LayerStack& stack, const SafeSet& safe) {
  const auto& eta = stack.eta1();
  auto on_grid = [&](double v, std::size_t i) {
    const double t = (v - stack.alpha()[i]) / eta[i];
    return std::abs(t - std::round(t)) <= kAlignTolerance * std::max(1.0, std::abs(t));
  };
  auto box_on_grid = [&](const Box& b) {
    for (std::size_t i = 0; i < stack.dim(); ++i) {
      if (!on_grid(b.lower[i], i) || !on_grid(b.upper[i], i)) return false;
    }
    return true;
  };
  if (!box_on_grid(safe.box)) return false;
  for (const auto& o : safe.obstacles) {
    if (!box_on_grid(o)) return false;
  }
  return true;
}

void SafetyProblem::validate() const {
  system.validate();
  const std::size_t n = system.dim;
  if (stack.dim() != n) throw ConfigError("grid: dimension differs from the system dimension");
  if (substeps < 1) throw ConfigError("integrator.substeps must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    const bool sys_periodic = system.is_periodic(i);
    if (sys_periodic != stack.periodic(i)) {
      throw ConfigError("grid: periodic flag of dimension " + std::to_string(i) +
                        " differs from the system");
    }
    if (sys_periodic) {
      const double width = stack.beta()[i] - stack.alpha()[i];
      if (std::abs(width - system.period[i]) > 1e-9 * system.period[i]) {
        throw ConfigError("grid: Y must span exactly one period in periodic dimension " +
                          std::to_string(i));
      }
    }
  }
  if (safe.box.lower.size() != n || safe.box.upper.size() != n) {
    throw ConfigError("safe: box has wrong dimension");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double tol = 1e-9 * stack.eta1()[i];
    if (safe.box.lower[i] > safe.box.upper[i]) throw ConfigError("safe: lower exceeds upper");
    if (safe.box.lower[i] < stack.alpha()[i] - tol || safe.box.upper[i] > stack.beta()[i] + tol) {
      throw ConfigError("safe: box is not contained in Y (dimension " + std::to_string(i) + ")");
    }
  }
  for (std::size_t j = 0; j < safe.obstacles.size(); ++j) {
    const auto& o = safe.obstacles[j];
    if (o.lower.size() != n || o.upper.size() != n) {
      throw ConfigError("obstacle." + std::to_string(j + 1) + ": wrong dimension");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (o.lower[i] > o.upper[i]) {
        throw ConfigError("obstacle." + std::to_string(j + 1) + ": lower exceeds upper");
      }
    }
  }
}

}  // namespace lazysynth
