#pragma once

#include <iosfwd>
#include <string>

#include "lazysynth/grid.hpp"
#include "lazysynth/synthesis.hpp"

namespace lazysynth {

/* Grid parameters a controller file is bound to. */
struct GridFingerprint {
  std::size_t dim = 0;
  int layers = 0;
  Vector alpha, beta, eta1;
  double tau1 = 0.0;
  std::vector<bool> periodic;

  static GridFingerprint of(const LayerStack& stack);
  LayerStack make_stack() const;
  /* exact comparison of every number */
  bool operator==(const GridFingerprint&) const = default;
  std::string describe() const;
};

struct StoredController {
  GridFingerprint fingerprint;
  LayerStack stack;
  MultiController controller;
};

/*
 * Text format, version 1:
 *
 *   lazysynth-controller 1
 *   dim <n>
 *   layers <L>
 *   alpha <n numbers>
 *   beta <n numbers>
 *   eta1 <n numbers>
 *   tau1 <number>
 *   periodic <n flags>
 *   cells <count>
 *   <layer> <index> <input>      one line per domain cell
 *   end
 *
 * Numbers are written in shortest round-trip form.
 */
void write_controller(std::ostream& os, const LayerStack& stack, const MultiController& ctrl);
void save_controller(const std::string& path, const LayerStack& stack, const MultiController& ctrl);

/* throws ConfigError on malformed input */
StoredController read_controller(std::istream& is);
StoredController load_controller(const std::string& path);

/* CSV with header layer,index,x0..x{n-1},input; centers of the domain cells */
void write_domain_csv(std::ostream& os, const LayerStack& stack, const MultiController& ctrl);

}  // namespace lazysynth
