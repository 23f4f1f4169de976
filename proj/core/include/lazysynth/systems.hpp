#pragma once

#include <vector>

#include "lazysynth/dynamics.hpp"
#include "lazysynth/problem.hpp"

namespace lazysynth {

/* One affine mode xdot = A x + b per input. */
struct AffineMode {
  SquareMatrix a;
  Vector b;
};

/* Switched affine system; input p selects mode p. The growth matrices
 * default to the Metzler bound of each A. */
ControlSystem make_switched_affine(std::vector<AffineMode> modes, Vector disturbance,
                                   Vector period = {});

/* DC-DC boost converter: two modes, W = [-0.001, 0.001]^2. */
std::vector<AffineMode> dcdc_modes();
ControlSystem make_dcdc_system();

/* rdot = -0.1 r + u, thetadot = 1 in polar coordinates, theta periodic. */
ControlSystem make_spiral_system(std::vector<double> inputs = {-0.2, -0.1, 0.0, 0.1, 0.2},
                                 Vector disturbance = {0.0, 0.0});

/* f = 0, W = {0}. */
ControlSystem make_zero_system(std::size_t dim, std::size_t num_inputs);

/* DC-DC safety problem on T = Y = [1.15,1.55] x [5.45,5.85], tau1 = 0.0625. */
SafetyProblem dcdc_problem(double eta1, int num_layers);

/* spiral problem with the default obstacles */
SafetyProblem spiral_problem(int num_layers = 3);

}  // namespace lazysynth
