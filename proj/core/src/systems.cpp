#include "lazysynth/systems.hpp"

#include <numbers>

#include "lazysynth/errors.hpp"

namespace lazysynth {

ControlSystem make_switched_affine(std::vector<AffineMode> modes, Vector disturbance,
                                   Vector period) {
  if (modes.empty()) throw ConfigError("system: switched affine system needs at least one mode");
  const std::size_t n = modes.front().a.n;
  ControlSystem sys;
  sys.dim = n;
  sys.disturbance = std::move(disturbance);
  sys.period = std::move(period);
  for (std::size_t p = 0; p < modes.size(); ++p) {
    if (modes[p].a.n != n || modes[p].b.size() != n) {
      throw ConfigError("system: mode " + std::to_string(p + 1) + " has wrong dimension");
    }
    sys.inputs.push_back({static_cast<double>(p + 1)});
    sys.growth.push_back(growth_from_linear(modes[p].a));
  }
  sys.rhs = [modes = std::move(modes), n](std::span<const double> x, std::span<const double> u,
                                          std::span<double> dx) {
    const AffineMode& m = modes[static_cast<std::size_t>(u[0]) - 1];
    for (std::size_t i = 0; i < n; ++i) {
      double acc = m.b[i];
      for (std::size_t j = 0; j < n; ++j) acc += m.a(i, j) * x[j];
      dx[i] = acc;
    }
  };
  return sys;
}

std::vector<AffineMode> dcdc_modes() {
  const double r0 = 1.0, vs = 1.0, rl = 0.05, rc = 0.5 * rl, xl = 3.0, xc = 70.0;
  const Vector b = {vs / xl, 0.0};
  SquareMatrix a1(2, {-rl / xl, 0.0,  //
                      0.0, -1.0 / xc * r0 / (r0 + rc)});
  SquareMatrix a2(2, {-1.0 / xl * (rl + r0 * rc / (r0 + rc)), 0.2 * (-1.0 / xl * r0 / (r0 + rc)),
                      5.0 * r0 / (r0 + rc) / xc, -1.0 / xc / (r0 + rc)});
  return {{a1, b}, {a2, b}};
}

ControlSystem make_dcdc_system() { return make_switched_affine(dcdc_modes(), {0.001, 0.001}); }

ControlSystem make_spiral_system(std::vector<double> inputs, Vector disturbance) {
  ControlSystem sys;
  sys.dim = 2;
  for (double u : inputs) sys.inputs.push_back({u});
  sys.disturbance = std::move(disturbance);
  sys.period = {0.0, 2.0 * std::numbers::pi};
  sys.rhs = [](std::span<const double> x, std::span<const double> u, std::span<double> dx) {
    dx[0] = -0.1 * x[0] + u[0];
    dx[1] = 1.0;
  };
  SquareMatrix g(2, {-0.1, 0.0, 0.0, 0.0});
  sys.growth.assign(sys.inputs.size(), g);
  return sys;
}

ControlSystem make_zero_system(std::size_t dim, std::size_t num_inputs) {
  ControlSystem sys;
  sys.dim = dim;
  for (std::size_t u = 0; u < num_inputs; ++u) sys.inputs.push_back({static_cast<double>(u)});
  sys.disturbance.assign(dim, 0.0);
  sys.rhs = [](std::span<const double>, std::span<const double>, std::span<double> dx) {
    for (double& d : dx) d = 0.0;
  };
  sys.growth.assign(num_inputs, SquareMatrix(dim));
  return sys;
}

SafetyProblem dcdc_problem(double eta1, int num_layers) {
  const Vector lo = {1.15, 5.45};
  const Vector hi = {1.55, 5.85};
  SafetyProblem p{make_dcdc_system(), LayerStack(lo, hi, {eta1, eta1}, 0.0625, num_layers),
                  SafeSet{Box{lo, hi}, {}}, 10};
  return p;
}

SafetyProblem spiral_problem(int num_layers) {
  constexpr double pi = std::numbers::pi;
  const Vector lo = {0.5, 0.0};
  const Vector hi = {2.5, 2.0 * pi};
  SafetyProblem p{make_spiral_system(),
                  LayerStack(lo, hi, {2.0 / 64.0, 2.0 * pi / 64.0}, 0.05, num_layers, {false, true}),
                  SafeSet{Box{lo, hi},
                          {Box{{1.25, 0.25 * pi}, {1.75, 0.5 * pi}},
                           Box{{0.75, pi}, {1.25, 1.25 * pi}}}},
                  10};
  return p;
}

}  // namespace lazysynth
