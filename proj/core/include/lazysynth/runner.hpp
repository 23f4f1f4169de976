#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lazysynth/closedloop.hpp"
#include "lazysynth/config.hpp"
#include "lazysynth/synthesis.hpp"

namespace lazysynth {

/* lazy[:L] | eager[:L] | single[:l]; L overrides the layer count of the
 * config, l selects the layer of the single-layer fixpoint (default 1) */
struct ModeSpec {
  enum class Kind { lazy, eager, single };
  Kind kind = Kind::lazy;
  int layers = 0;  // 0: from the config
  int single_layer = 1;

  std::string label() const;
  bool operator==(const ModeSpec&) const = default;
};

/* throws ConfigError */
ModeSpec parse_mode(const std::string& text);

struct RunOptions {
  int substeps = 0;      // 0: from the config
  int threads = -1;      // -1: from the config, 0: hardware concurrency
  bool record_sets = false;
};

struct LayerReport {
  int layer = 0;
  std::size_t computed_pairs = 0;
  double explore_seconds = 0.0;
  std::size_t fixpoint_cells = 0;
  std::size_t domain_cells = 0;
  double domain_area = 0.0;  // domain_cells times the layer-l cell volume
};

struct RunReport {
  std::string mode;
  std::string system;
  int layers = 0;
  std::size_t iterations = 0;
  std::size_t winning_cells = 0;  // layer 1
  double winning_area = 0.0;
  /* sum of per-layer domain areas and area of the layer-1 union of the
   * domains; equal unless domains of different layers overlap */
  double domain_area_sum = 0.0;
  double domain_union_area = 0.0;
  double explore_seconds = 0.0;
  double synthesis_seconds = 0.0;
  double total_seconds = 0.0;
  std::vector<LayerReport> per_layer;
};

struct RunOutcome {
  SafetyProblem problem;
  SynthesisResult result;
  RunReport report;
  std::string cache_dump;  // only with RunOptions::record_sets
};

/* Solves the configured problem in the given mode. */
RunOutcome run_mode(const ProblemConfig& config, const ModeSpec& mode, const RunOptions& options);

std::string report_json(const RunReport& report);
void write_sets_dump(std::ostream& os, const SynthesisResult& result);

/* synth: solve, then write <out>.ctrl, <out>.domain.csv and <out>.report.json
 * (plus <out>.sets.txt and <out>.transitions.txt with record_sets) */
RunOutcome run_synth(const ProblemConfig& config, const ModeSpec& mode, const RunOptions& options,
                     const std::string& out_prefix);

struct Comparison {
  std::vector<RunOutcome> runs;
  std::string table;
};

/* Runs every mode on the same problem. Throws PropertyViolation if lazy and
 * eager runs with the same layer count disagree on the winning set or a
 * controller domain, or if a repeated mode gives a different result. */
Comparison run_compare(const ProblemConfig& config, const std::vector<ModeSpec>& modes,
                       const RunOptions& options);

struct SimulateOptions {
  std::size_t count = 100;
  std::size_t steps = 100;
  std::uint64_t seed = 0;
  std::size_t keep_trajectories = 0;
  std::string trajectory_prefix;  // <prefix>.<k>.csv for the kept rollouts
};

struct SimulateOutcome {
  bool nothing_to_simulate = false;
  BatchSummary summary;
  std::string text;
};

/* Checks the grid fingerprint of the controller against the config first
 * (ConfigError on mismatch). Throws PropertyViolation if any rollout was
 * unsafe or left the domain. */
SimulateOutcome run_simulate(const std::string& controller_path, const ProblemConfig& config,
                             const SimulateOptions& sim, const RunOptions& options);

/* domain CSV of a stored controller */
void run_export_domain(const std::string& controller_path, const std::string& out_path);

}  // namespace lazysynth
