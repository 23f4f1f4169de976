// lazysynth command-line tool: synth, compare, simulate, export-domain.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lazysynth/errors.hpp"
#include "lazysynth/runner.hpp"

using namespace lazysynth;

namespace {

void print_summary(const RunReport& r) {
  std::printf("mode %s, L = %d, iterations %zu\n", r.mode.c_str(), r.layers, r.iterations);
  std::printf("winning cells %zu (area %.6g)\n", r.winning_cells, r.winning_area);
  std::printf("time: explore %.3f s, synthesis %.3f s, total %.3f s\n", r.explore_seconds,
              r.synthesis_seconds, r.total_seconds);
  for (const auto& lr : r.per_layer) {
    std::printf("  layer %d: pairs %zu, domain cells %zu, domain area %.6g\n", lr.layer,
                lr.computed_pairs, lr.domain_cells, lr.domain_area);
  }
  std::printf("domain area: sum %.6g, layer-1 union %.6g\n", r.domain_area_sum, r.domain_union_area);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-layered lazy abstraction-based safety controller synthesis"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions run_opts;
  bool dump_sets = false;
  app.add_option("--substeps", run_opts.substeps, "RK4 substeps per sampling period")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", run_opts.threads, "worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--debug-dump-sets", dump_sets,
               "write per-iteration W and safe sets plus the transition cache");

  std::string config_path, controller_path, out, json_path, mode_text;
  std::vector<std::string> modes;
  SimulateOptions sim;
  int sim_layers = 0;
  std::optional<std::uint64_t> sim_seed;

  auto* synth = app.add_subcommand("synth", "solve the problem of a config file");
  synth->add_option("config", config_path, "config file")->required();
  synth->add_option("--mode", mode_text, "lazy[:L] | eager[:L] | single[:l]; overrides the config");
  synth->add_option("--out", out, "output prefix")->default_val("lazysynth");

  auto* compare = app.add_subcommand("compare", "run several modes on the same problem");
  compare->add_option("config", config_path, "config file")->required();
  compare->add_option("--modes", modes, "modes, e.g. lazy:3 eager:3 single:1")->required();
  compare->add_option("--json", json_path, "also write the reports as a JSON array");

  auto* simulate = app.add_subcommand("simulate", "closed-loop rollouts of a stored controller");
  simulate->add_option("controller", controller_path, "controller file")->required();
  simulate->add_option("config", config_path, "config file")->required();
  simulate->add_option("--count", sim.count, "number of rollouts")->default_val(100);
  simulate->add_option("--steps", sim.steps, "steps per rollout")->default_val(100);
  simulate->add_option("--seed", sim_seed, "random seed (default: config seed)");
  simulate->add_option("--layers", sim_layers, "layer count of the controller (default: config)");
  simulate->add_option("--trajectories", sim.keep_trajectories, "number of rollouts to export");
  simulate->add_option("--trajectory-prefix", sim.trajectory_prefix,
                       "CSV files <prefix>.<k>.csv for exported rollouts");

  auto* export_domain = app.add_subcommand("export-domain", "controller domain as CSV");
  export_domain->add_option("controller", controller_path, "controller file")->required();
  export_domain->add_option("--out", out, "output CSV ('-' for stdout)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  run_opts.record_sets = dump_sets;

  try {
    if (*synth) {
      ProblemConfig cfg = load_config(config_path);
      const ModeSpec mode = parse_mode(mode_text.empty() ? cfg.mode : mode_text);
      const RunOutcome r = run_synth(cfg, mode, run_opts, out);
      print_summary(r.report);
      std::printf("wrote %s.ctrl, %s.domain.csv, %s.report.json\n", out.c_str(), out.c_str(),
                  out.c_str());
    } else if (*compare) {
      ProblemConfig cfg = load_config(config_path);
      std::vector<ModeSpec> specs;
      for (const auto& m : modes) specs.push_back(parse_mode(m));
      const Comparison cmp = run_compare(cfg, specs, run_opts);
      std::cout << cmp.table;
      if (!json_path.empty()) {
        std::ofstream f(json_path);
        if (!f) throw ConfigError("cannot write '" + json_path + "'");
        f << "[\n";
        for (std::size_t k = 0; k < cmp.runs.size(); ++k) {
          std::string j = report_json(cmp.runs[k].report);
          j.pop_back();
          f << j << (k + 1 < cmp.runs.size() ? ",\n" : "\n");
        }
        f << "]\n";
      }
      std::cout << "lazy/eager agreement: ok\n";
    } else if (*simulate) {
      ProblemConfig cfg = load_config(config_path);
      if (sim_layers > 0) cfg.layers = sim_layers;
      sim.seed = sim_seed.value_or(cfg.seed);
      const SimulateOutcome s = run_simulate(controller_path, cfg, sim, run_opts);
      std::cout << s.text;
      if (!s.nothing_to_simulate &&
          (s.summary.unsafe_rollouts > 0 || s.summary.domain_exits > 0)) {
        std::cerr << "error: closed loop is not safe\n";
        return 3;
      }
    } else if (*export_domain) {
      run_export_domain(controller_path, out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
