#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lazysynth {

using Vector = std::vector<double>;

/* Dense row-major square matrix; only used for the growth bound. */
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t dim) : n(dim), data(dim * dim, 0.0) {}
  SquareMatrix(std::size_t dim, std::vector<double> row_major);

  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/* dx = f(x, u). Must not allocate-and-return; writes into dx. */
using RhsFunction =
    std::function<void(std::span<const double> x, std::span<const double> u, std::span<double> dx)>;

/*
 * class: ControlSystem
 *
 * Continuous-time system  xdot in f(x,u) + W  with a finite input list,
 * a box disturbance W = prod_i [-w_i, w_i] and a per-input growth-bound
 * matrix L_u (non-negative off-diagonal entries) used to over-approximate
 * reachable sets:  rdot = L_u r + w.
 */
struct ControlSystem {
  std::size_t dim = 0;
  std::vector<Vector> inputs;
  RhsFunction rhs;
  Vector disturbance;
  std::vector<SquareMatrix> growth;
  /* period per dimension, 0 means the dimension does not wrap */
  Vector period;

  std::size_t num_inputs() const { return inputs.size(); }
  bool is_periodic(std::size_t i) const { return !period.empty() && period[i] > 0.0; }

  /* throws ConfigError naming the first violated invariant */
  void validate() const;
};

/* Axis-aligned box [center - radius, center + radius]. */
struct ReachBox {
  Vector center;
  Vector radius;

  Vector lower() const;
  Vector upper() const;
};

/* wrap periodic components of x into [0, p_i) */
void wrap_periodic(const ControlSystem& sys, std::span<double> x);

/* Classical RK4 solution of xdot = f(x,u) at time tau with `substeps`
 * equal steps. Periodic components are wrapped afterwards. */
Vector integrate_nominal(const ControlSystem& sys, std::span<const double> x0, std::size_t u_index,
                         double tau, int substeps);

/* RK4 on xdot = f(x,u) + w(t) with w piecewise constant: w_per_substep holds
 * `substeps` consecutive disturbance vectors (row-major, substeps x dim). */
Vector integrate_perturbed(const ControlSystem& sys, std::span<const double> x0,
                           std::size_t u_index, double tau, int substeps,
                           std::span<const double> w_per_substep);

/* RK4 on the radius dynamics rdot = L_u r + w starting from r0. */
Vector growth_radius(const ControlSystem& sys, std::span<const double> r0, std::size_t u_index,
                     double tau, int substeps);

/* Over-approximation of the time-tau reachable set of the cell with the
 * given center and half-width under input u_index. */
ReachBox reach_box(const ControlSystem& sys, std::span<const double> cell_center,
                   std::span<const double> cell_half_width, std::size_t u_index, double tau,
                   int substeps);

/* Metzler growth matrix of a linear vector field A: |a_ij| off the
 * diagonal, a_ii on it. */
SquareMatrix growth_from_linear(const SquareMatrix& a);

std::string format_vector(std::span<const double> v);

}  // namespace lazysynth
