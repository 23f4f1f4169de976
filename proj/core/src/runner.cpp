#include "lazysynth/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "lazysynth/controller_io.hpp"
#include "lazysynth/errors.hpp"

namespace lazysynth {

namespace {

int effective_layers(const ProblemConfig& config, const ModeSpec& mode) {
  return mode.layers > 0 ? mode.layers : config.layers;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

RunReport make_report(const ProblemConfig& config, const ModeSpec& mode, const SafetyProblem& p,
                      const SynthesisResult& r) {
  const LayerStack& stack = p.stack;
  RunReport rep;
  rep.mode = mode.label();
  rep.system = config.system_name;
  rep.layers = stack.num_layers();
  rep.iterations = r.stats.iterations;
  rep.winning_cells = r.winning.count();
  rep.winning_area = static_cast<double>(rep.winning_cells) * stack.cell_volume(1);
  rep.explore_seconds = r.explore_seconds();
  rep.synthesis_seconds = r.synthesis_seconds();
  rep.total_seconds = r.total_seconds;
  CellSet union_1 = stack.empty_set(1);
  for (int l = 1; l <= stack.num_layers(); ++l) {
    const auto li = static_cast<std::size_t>(l - 1);
    LayerReport lr;
    lr.layer = l;
    lr.computed_pairs = r.stats.layers.at(li).computed_pairs;
    lr.explore_seconds = r.stats.layers.at(li).explore_seconds;
    lr.fixpoint_cells = li < r.fixpoint_sets.size() ? r.fixpoint_sets[li].count() : 0;
    lr.domain_cells = r.controller.domain(l).count();
    lr.domain_area = static_cast<double>(lr.domain_cells) * stack.cell_volume(l);
    rep.domain_area_sum += lr.domain_area;
    union_1 |= gamma(stack, r.controller.domain(l), 1);
    rep.per_layer.push_back(lr);
  }
  rep.domain_union_area = static_cast<double>(union_1.count()) * stack.cell_volume(1);
  return rep;
}

std::string format_table(const std::vector<RunOutcome>& runs) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "mode" << std::right << std::setw(4) << "L" << std::setw(6)
     << "N" << std::setw(12) << "winning" << std::setw(11) << "explore_s" << std::setw(11)
     << "synth_s" << std::setw(11) << "total_s" << "  pairs per layer\n";
  for (const auto& run : runs) {
    const RunReport& r = run.report;
    os << std::left << std::setw(10) << r.mode << std::right << std::setw(4) << r.layers
       << std::setw(6) << r.iterations << std::setw(12) << r.winning_cells << std::fixed
       << std::setprecision(3) << std::setw(11) << r.explore_seconds << std::setw(11)
       << r.synthesis_seconds << std::setw(11) << r.total_seconds << " ";
    os.unsetf(std::ios::floatfield);
    for (const auto& lr : r.per_layer) os << ' ' << lr.computed_pairs;
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::string ModeSpec::label() const {
  switch (kind) {
    case Kind::lazy:
      return layers > 0 ? "lazy:" + std::to_string(layers) : "lazy";
    case Kind::eager:
      return layers > 0 ? "eager:" + std::to_string(layers) : "eager";
    case Kind::single:
      return "single:" + std::to_string(single_layer);
  }
  return "?";
}

ModeSpec parse_mode(const std::string& text) {
  ModeSpec m;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  int arg = 0;
  if (colon != std::string::npos) {
    const std::string a = text.substr(colon + 1);
    std::size_t used = 0;
    try {
      arg = std::stoi(a, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.size() || a.empty() || arg < 1 || arg > 30) {
      throw ConfigError("mode '" + text + "': expected a layer number in [1, 30] after ':'");
    }
  }
  if (name == "lazy") {
    m.kind = ModeSpec::Kind::lazy;
    m.layers = arg;
  } else if (name == "eager") {
    m.kind = ModeSpec::Kind::eager;
    m.layers = arg;
  } else if (name == "single") {
    m.kind = ModeSpec::Kind::single;
    m.single_layer = arg > 0 ? arg : 1;
  } else {
    throw ConfigError("mode '" + text + "': expected lazy[:L], eager[:L] or single[:l]");
  }
  return m;
}

RunOutcome run_mode(const ProblemConfig& config, const ModeSpec& mode, const RunOptions& options) {
  RunOutcome out{config.problem(effective_layers(config, mode)), {}, {}, {}};
  SafetyProblem& p = out.problem;
  if (options.substeps > 0) p.substeps = options.substeps;
  const LayerStack& stack = p.stack;
  if (mode.kind == ModeSpec::Kind::single && mode.single_layer > stack.num_layers()) {
    throw ConfigError("mode " + mode.label() + ": layer exceeds grid.layers (" +
                      std::to_string(stack.num_layers()) + ")");
  }

  ReachTransitionSource source(p.system, stack, p.substeps);
  TransitionCache cache(stack, p.system.num_inputs());
  cache.set_threads(options.threads >= 0 ? static_cast<unsigned>(options.threads) : config.threads);
  const CellSet safe_1 = safe_cells(stack, p.safe, 1);
  SynthesisOptions sopts;
  sopts.record_sets = options.record_sets;

  SynthesisResult& r = out.result;
  switch (mode.kind) {
    case ModeSpec::Kind::lazy:
      r = lazy_safe(cache, source, safe_1, sopts);
      break;
    case ModeSpec::Kind::eager:
      r = eager_safe(cache, source, safe_1, sopts);
      break;
    case ModeSpec::Kind::single: {
      const auto t0 = std::chrono::steady_clock::now();
      const int l = mode.single_layer;
      SingleLayerResult s = single_layer_safe(cache, source, gamma(stack, safe_1, l));
      r.winning = gamma(stack, s.winning, 1);
      r.controller = std::move(s.controller);
      for (int k = 1; k <= stack.num_layers(); ++k) {
        r.fixpoint_sets.push_back(k == l ? s.winning : stack.empty_set(k));
      }
      r.stats = cache.stats();
      r.stats.iterations = s.iterations;
      r.total_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      break;
    }
  }
  validate_controller(cache, r.controller, r.winning, safe_1);
  out.report = make_report(config, mode, p, r);
  if (options.record_sets) {
    std::ostringstream os;
    cache.dump(os);
    out.cache_dump = os.str();
  }
  return out;
}

std::string report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["mode"] = r.mode;
  j["system"] = r.system;
  j["layers"] = r.layers;
  j["iterations"] = r.iterations;
  j["winning_cells"] = r.winning_cells;
  j["winning_area"] = r.winning_area;
  j["domain_area_sum"] = r.domain_area_sum;
  j["domain_union_area"] = r.domain_union_area;
  j["explore_seconds"] = r.explore_seconds;
  j["synthesis_seconds"] = r.synthesis_seconds;
  j["total_seconds"] = r.total_seconds;
  auto& per = j["per_layer"] = nlohmann::ordered_json::array();
  for (const auto& lr : r.per_layer) {
    per.push_back({{"layer", lr.layer},
                   {"computed_pairs", lr.computed_pairs},
                   {"explore_seconds", lr.explore_seconds},
                   {"fixpoint_cells", lr.fixpoint_cells},
                   {"domain_cells", lr.domain_cells},
                   {"domain_area", lr.domain_area}});
  }
  return j.dump(2) + "\n";
}

void write_sets_dump(std::ostream& os, const SynthesisResult& result) {
  auto list = [&](const CellSet& s) {
    os << s.count() << ':';
    s.for_each([&](std::size_t c) { os << ' ' << c; });
    os << '\n';
  };
  for (const auto& rec : result.sets) {
    os << "iteration " << rec.iteration << " layer " << rec.layer << " W ";
    list(rec.w);
    os << "iteration " << rec.iteration << " layer " << rec.layer << " upsilon' ";
    list(rec.upsilon_prime);
  }
}

RunOutcome run_synth(const ProblemConfig& config, const ModeSpec& mode, const RunOptions& options,
                     const std::string& out_prefix) {
  RunOutcome out = run_mode(config, mode, options);
  save_controller(out_prefix + ".ctrl", out.problem.stack, out.result.controller);
  {
    auto f = open_out(out_prefix + ".domain.csv");
    write_domain_csv(f, out.problem.stack, out.result.controller);
  }
  {
    auto f = open_out(out_prefix + ".report.json");
    f << report_json(out.report);
  }
  if (options.record_sets) {
    auto f = open_out(out_prefix + ".sets.txt");
    write_sets_dump(f, out.result);
    auto t = open_out(out_prefix + ".transitions.txt");
    t << out.cache_dump;
  }
  return out;
}

Comparison run_compare(const ProblemConfig& config, const std::vector<ModeSpec>& modes,
                       const RunOptions& options) {
  if (modes.empty()) throw ConfigError("compare: no modes given");
  Comparison cmp;
  for (const auto& m : modes) cmp.runs.push_back(run_mode(config, m, options));
  cmp.table = format_table(cmp.runs);

  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      const RunOutcome& a = cmp.runs[i];
      const RunOutcome& b = cmp.runs[j];
      const std::string pair = modes[i].label() + " vs " + modes[j].label();
      if (modes[i] == modes[j] || (modes[i].kind == ModeSpec::Kind::single &&
                                   modes[j].kind == ModeSpec::Kind::single &&
                                   modes[i].single_layer == modes[j].single_layer &&
                                   a.report.layers == b.report.layers)) {
        if (!(a.result.winning == b.result.winning) || !(a.result.controller == b.result.controller)) {
          throw PropertyViolation("repeated mode is not deterministic: " + pair);
        }
        continue;
      }
      const bool multi_a = modes[i].kind != ModeSpec::Kind::single;
      const bool multi_b = modes[j].kind != ModeSpec::Kind::single;
      if (!multi_a || !multi_b || a.report.layers != b.report.layers) continue;
      if (!(a.result.winning == b.result.winning)) {
        throw PropertyViolation("winning sets differ: " + pair);
      }
      for (int l = 1; l <= a.report.layers; ++l) {
        if (!(a.result.controller.domain(l) == b.result.controller.domain(l))) {
          throw PropertyViolation("controller domains of layer " + std::to_string(l) +
                                  " differ: " + pair);
        }
      }
    }
  }
  return cmp;
}

SimulateOutcome run_simulate(const std::string& controller_path, const ProblemConfig& config,
                             const SimulateOptions& sim, const RunOptions& options) {
  const StoredController stored = load_controller(controller_path);
  SafetyProblem p = config.problem(stored.fingerprint.layers);
  const GridFingerprint expected = GridFingerprint::of(p.stack);
  if (!(expected == stored.fingerprint)) {
    throw ConfigError("controller grid does not match the config: controller has " +
                      stored.fingerprint.describe() + ", config has " + expected.describe());
  }
  if (options.substeps > 0) p.substeps = options.substeps;

  SimulateOutcome out;
  if (stored.controller.total_cells() == 0) {
    out.nothing_to_simulate = true;
    out.text = "nothing to simulate: the controller domain is empty\n";
    return out;
  }
  const QuantizerView view(stored.controller, p.stack);
  const unsigned threads =
      options.threads >= 0 ? static_cast<unsigned>(options.threads) : config.threads;
  out.summary = simulate_batch(view, p, sim.count, sim.steps, sim.seed, threads,
                               sim.trajectory_prefix.empty() ? 0 : sim.keep_trajectories);
  for (std::size_t k = 0; k < out.summary.trajectories.size(); ++k) {
    auto f = open_out(sim.trajectory_prefix + "." + std::to_string(k) + ".csv");
    write_trajectory_csv(f, out.summary.trajectories[k]);
  }

  const BatchSummary& s = out.summary;
  std::ostringstream os;
  os << "rollouts " << s.rollouts << " x " << s.steps_per_rollout << " steps\n";
  os << "unsafe rollouts " << s.unsafe_rollouts << "\n";
  os << "safety violations " << s.violations << "\n";
  os << "domain exits " << s.domain_exits << "\n";
  os << "layer usage";
  for (std::size_t l = 0; l < s.layer_usage.size(); ++l) os << ' ' << (l + 1) << ':' << s.layer_usage[l];
  os << '\n';
  for (const auto& f : s.failures) os << "failure: " << f << '\n';
  out.text = os.str();
  return out;
}

void run_export_domain(const std::string& controller_path, const std::string& out_path) {
  const StoredController stored = load_controller(controller_path);
  if (out_path == "-") {
    write_domain_csv(std::cout, stored.stack, stored.controller);
    return;
  }
  auto f = open_out(out_path);
  write_domain_csv(f, stored.stack, stored.controller);
}

}  // namespace lazysynth
