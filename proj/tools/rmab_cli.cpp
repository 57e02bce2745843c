// rmab: experiment runner for decentralized restless bandits.
//
//   rmab validate <config>
//   rmab derive-params <config>
//   rmab run <config> [--seeds K] [--out DIR]
//   rmab bounds <config> --t T

#include <CLI11.hpp>

#include <iostream>

#include "rmab/errors.hpp"
#include "rmab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized restless multi-armed bandit simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* derive = app.add_subcommand("derive-params", "Report the L and D thresholds for a config");
  derive->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::optional<std::uint64_t> seeds;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run the seed sweep and write traces, regret series and a summary");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seeds", seeds, "Use seeds 1..K instead of the configured list");
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::int64_t t = 0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate both regret bounds and the measured regret at slot T");
  bounds->add_option("config", config_path, "Experiment config (JSON)")->required();
  bounds->add_option("--t", t, "Slot at which to evaluate")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = rmab::load_config(config_path);
    if (*validate) {
      std::cout << "ok " << rmab::config_digest(config) << " (N=" << config.arms.size() << ", M=" << config.num_players
                << ")\n";
    } else if (*derive) {
      const auto d = rmab::derive_params(config);
      if (d.configured && !d.bounds_binding())
        std::cerr << "warning: configured L/D are below the thresholds (practical mode)\n";
      std::cout << rmab::to_json(d).dump(2) << '\n';
    } else if (*run) {
      if (seeds) config.seeds = rmab::seed_range(*seeds);
      if (out_dir) config.output_dir = *out_dir;
      rmab::validate(config);
      const auto summary = rmab::run_experiment(config, config.output_dir);
      std::cout << "wrote " << config.seeds.size() << " seed(s) to " << config.output_dir << '\n';
      if (!summary["bound_report"].empty()) std::cout << summary["bound_report"].back().dump() << '\n';
    } else if (*bounds) {
      std::cout << rmab::bounds_report(config, t).dump(2) << '\n';
    }
  } catch (const rmab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const rmab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
