#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lazysynth/dynamics.hpp"
#include "lazysynth/problem.hpp"

namespace lazysynth {

/*
 * Problem configuration.
 *
 * Flat "key = value" text, one entry per line, '#' starts a comment. Vector
 * values are separated by blanks or commas. Numbers are decimal with an
 * optional exponent; "pi", "k*pi" and "pi/k" are accepted as well.
 *
 *   system             dcdc | spiral | zero | linear
 *   system.dim         state dimension (zero, linear)
 *   system.inputs      zero: number of inputs; spiral: list of input values
 *   system.modes       linear: number of modes (one input per mode)
 *   system.mode.K.a    linear: row-major n x n matrix of mode K (1-based)
 *   system.mode.K.b    linear: affine term of mode K
 *   system.mode.K.growth  optional growth matrix of mode K
 *   system.disturbance half widths of W
 *   system.period      per-dimension period, 0 for none (linear)
 *   grid.alpha, grid.beta, grid.eta1, grid.tau1, grid.layers
 *   safe.lower, safe.upper          defaults to Y
 *   obstacle.N.lower, obstacle.N.upper  replace the builtin obstacles
 *   obstacles          "none" drops the builtin obstacles
 *   integrator.substeps
 *   synthesis.mode     lazy | eager | single:l
 *   seed, threads
 *
 * The builtin systems "dcdc" and "spiral" come with defaults for every grid
 * and safe-set key.
 */
struct ProblemConfig {
  std::string system_name;
  ControlSystem system;
  Vector alpha, beta, eta1;
  double tau1 = 0.0;
  int layers = 1;
  SafeSet safe;
  int substeps = 10;
  std::string mode = "lazy";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  /* builds the problem, optionally with another number of layers */
  SafetyProblem problem(int layers_override = 0) const;
};

/* throws ConfigError naming the offending key */
ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::string& path);

/* one number in config syntax */
double parse_number(std::string_view token);

}  // namespace lazysynth
