#pragma once

// Closed-form solution of xdot = A x + b through the matrix exponential of
// the augmented matrix [[A, b], [0, 0]].

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lazysynth/dynamics.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const lazysynth::SquareMatrix& m) {
  Eigen::MatrixXd out(m.n, m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) out(i, j) = m(i, j);
  return out;
}

inline lazysynth::Vector affine_flow(const Eigen::MatrixXd& a, const lazysynth::Vector& b,
                                     const lazysynth::Vector& x0, double t) {
  const auto n = a.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = a * t;
  for (Eigen::Index i = 0; i < n; ++i) m(i, n) = b[static_cast<std::size_t>(i)] * t;
  const Eigen::MatrixXd e = m.exp();
  lazysynth::Vector out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = e(i, n);
    for (Eigen::Index j = 0; j < n; ++j) acc += e(i, j) * x0[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace oracle
