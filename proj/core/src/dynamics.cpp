#include "lazysynth/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "lazysynth/errors.hpp"

namespace lazysynth {

SquareMatrix::SquareMatrix(std::size_t dim, std::vector<double> row_major)
    : n(dim), data(std::move(row_major)) {
  if (data.size() != n * n) {
    throw ConfigError("matrix needs " + std::to_string(n * n) + " entries, got " +
                      std::to_string(data.size()));
  }
}

void ControlSystem::validate() const {
  if (dim == 0) throw ConfigError("system: dimension must be positive");
  if (inputs.empty()) throw ConfigError("system: input list is empty");
  if (!rhs) throw ConfigError("system: right-hand side is not set");
  if (disturbance.size() != dim) throw ConfigError("system: disturbance has wrong dimension");
  for (double w : disturbance) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("system: disturbance must be >= 0");
  }
  if (growth.size() != inputs.size()) {
    throw ConfigError("system: need exactly one growth matrix per input");
  }
  for (std::size_t u = 0; u < growth.size(); ++u) {
    const auto& m = growth[u];
    if (m.n != dim) throw ConfigError("system: growth matrix " + std::to_string(u) + " has wrong size");
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        if (!std::isfinite(m(i, j))) throw ConfigError("system: growth matrix is not finite");
        if (i != j && m(i, j) < 0.0) {
          throw ConfigError("system: growth matrix " + std::to_string(u) +
                            " has a negative off-diagonal entry");
        }
      }
    }
  }
  if (!period.empty()) {
    if (period.size() != dim) throw ConfigError("system: period has wrong dimension");
    for (double p : period) {
      if (p < 0.0 || !std::isfinite(p)) throw ConfigError("system: period must be >= 0");
    }
  }
}

Vector ReachBox::lower() const {
  Vector v(center.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = center[i] - radius[i];
  return v;
}

Vector ReachBox::upper() const {
  Vector v(center.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = center[i] + radius[i];
  return v;
}

std::string format_vector(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

void wrap_periodic(const ControlSystem& sys, std::span<double> x) {
  if (sys.period.empty()) return;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = sys.period[i];
    if (p <= 0.0) continue;
    double v = std::fmod(x[i], p);
    if (v < 0.0) v += p;
    if (v >= p) v = 0.0;
    x[i] = v;
  }
}

namespace {

void check_finite(std::span<const double> v, const char* what, std::span<const double> x0,
                  std::size_t u_index) {
  for (double d : v) {
    if (!std::isfinite(d)) {
      throw NumericalError(std::string("numerical blow-up in ") + what + " from " +
                           format_vector(x0) + " under input " + std::to_string(u_index));
    }
  }
}

void check_step_args(double tau, int substeps) {
  if (!(tau > 0.0)) throw PreconditionError("integration time must be positive");
  if (substeps < 1) throw PreconditionError("substeps must be >= 1");
}

/* One RK4 pass over [0, tau] for an autonomous field g(x, k, dx) where k is
 * the substep number. */
template <typename Field>
void rk4(std::size_t n, std::span<double> x, double tau, int substeps, Field&& g) {
  const double h = tau / substeps;
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int s = 0; s < substeps; ++s) {
    g(std::span<const double>(x.data(), n), s, std::span<double>(k1));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    g(std::span<const double>(tmp), s, std::span<double>(k2));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    g(std::span<const double>(tmp), s, std::span<double>(k3));
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    g(std::span<const double>(tmp), s, std::span<double>(k4));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
}

}  // namespace

Vector integrate_nominal(const ControlSystem& sys, std::span<const double> x0, std::size_t u_index,
                         double tau, int substeps) {
  check_step_args(tau, substeps);
  const std::span<const double> u(sys.inputs.at(u_index));
  Vector x(x0.begin(), x0.end());
  rk4(sys.dim, x, tau, substeps,
      [&](std::span<const double> s, int, std::span<double> dx) { sys.rhs(s, u, dx); });
  check_finite(x, "nominal integration", x0, u_index);
  wrap_periodic(sys, x);
  return x;
}

Vector integrate_perturbed(const ControlSystem& sys, std::span<const double> x0,
                           std::size_t u_index, double tau, int substeps,
                           std::span<const double> w_per_substep) {
  check_step_args(tau, substeps);
  if (w_per_substep.size() != sys.dim * static_cast<std::size_t>(substeps)) {
    throw PreconditionError("disturbance samples must have substeps * dim entries");
  }
  const std::span<const double> u(sys.inputs.at(u_index));
  const std::size_t n = sys.dim;
  Vector x(x0.begin(), x0.end());
  rk4(n, x, tau, substeps, [&](std::span<const double> s, int k, std::span<double> dx) {
    sys.rhs(s, u, dx);
    for (std::size_t i = 0; i < n; ++i) dx[i] += w_per_substep[k * n + i];
  });
  check_finite(x, "perturbed integration", x0, u_index);
  wrap_periodic(sys, x);
  return x;
}

Vector growth_radius(const ControlSystem& sys, std::span<const double> r0, std::size_t u_index,
                     double tau, int substeps) {
  check_step_args(tau, substeps);
  const SquareMatrix& lm = sys.growth.at(u_index);
  const std::size_t n = sys.dim;
  Vector r(r0.begin(), r0.end());
  rk4(n, r, tau, substeps, [&](std::span<const double> s, int, std::span<double> dr) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = sys.disturbance[i];
      for (std::size_t j = 0; j < n; ++j) acc += lm(i, j) * s[j];
      dr[i] = acc;
    }
  });
  check_finite(r, "growth-bound integration", r0, u_index);
  // RK4 of a Metzler system starting at r0 >= 0 stays >= 0 up to rounding
  for (double& v : r) {
    if (v < 0.0) v = 0.0;
  }
  return r;
}

ReachBox reach_box(const ControlSystem& sys, std::span<const double> cell_center,
                   std::span<const double> cell_half_width, std::size_t u_index, double tau,
                   int substeps) {
  for (double h : cell_half_width) {
    if (!(h > 0.0)) throw PreconditionError("cell half-width must be positive");
  }
  ReachBox box;
  box.center = integrate_nominal(sys, cell_center, u_index, tau, substeps);
  box.radius = growth_radius(sys, cell_half_width, u_index, tau, substeps);
  for (std::size_t i = 0; i < sys.dim; ++i) {
    if (sys.is_periodic(i) && box.radius[i] >= 0.5 * sys.period[i]) {
      throw NumericalError("reach box radius " + std::to_string(box.radius[i]) +
                           " covers half the period of dimension " + std::to_string(i) +
                           " (cell " + format_vector(cell_center) + ", input " +
                           std::to_string(u_index) + ")");
    }
  }
  return box;
}

SquareMatrix growth_from_linear(const SquareMatrix& a) {
  SquareMatrix l(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) l(i, j) = i == j ? a(i, j) : std::abs(a(i, j));
  }
  return l;
}

}  // namespace lazysynth
