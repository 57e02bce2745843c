#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmab/analysis.hpp"
#include "rmab/config.hpp"

namespace rmab {

/// Parameter thresholds for a configured system and whether the configured
/// (L, D) meet them.
struct ParamDerivation {
  SystemParams system;
  double l_threshold = 0.0;
  double l_threshold_factor7 = 0.0;
  double d_threshold = 0.0;  // 4 l_threshold / gap^2, i.e. the D that pairs with the minimal L
  std::optional<FixedParams> configured;
  std::optional<double> d_threshold_for_configured_L;
  bool l_valid = false;
  bool d_valid = false;

  /// True when the configured fixed parameters satisfy both conditions, so
  /// the regret bounds are guaranteed to hold.
  bool bounds_binding() const { return configured && l_valid && d_valid; }
  /// The smallest parameters for which the bounds hold.
  FixedParams minimal_valid() const { return {l_threshold, d_threshold}; }
};

/// Throws ValidationError when the stationary means are not pairwise
/// distinct or when M = N (the separation gap is undefined).
ParamDerivation derive_params(const ExperimentConfig& config);
nlohmann::json to_json(const ParamDerivation& derivation);

/// Per-seed result of a streamed run.
struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<Slot> report_times;
  std::vector<double> regret;          // r(t) at report_times
  std::vector<bool> epoch_end;
  double total_reward = 0.0;
  std::vector<double> player_reward;
  std::int64_t collisions_exploration = 0;  // arm-slots with two or more players
  std::int64_t collisions_exploitation = 0;
  std::vector<EpochRecord> epoch_log;  // player 1
};

struct RunHooks {
  /// Called after every slot with the record and the players' state.
  std::function<void(const SlotRecord&, const std::vector<RucbPlayer>&)> on_slot;
  /// Extra report times (besides the default cadence).
  std::function<bool(Slot)> report_at;
};

/// Streams one seed through the simulation without keeping the trace.
/// `trace_csv`, when given, receives the per-player trace rows.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const RunHooks& hooks = {},
                    std::ostream* trace_csv = nullptr);

/// Runs seeds (in parallel when hardware allows) and returns results in seed order.
std::vector<SeedResult> run_seeds(const ExperimentConfig& config, const RunHooks& hooks = {});

struct Aggregate {
  std::vector<Slot> times;
  std::vector<double> mean;
  std::vector<double> ci95;
  std::vector<bool> epoch_end;
};

/// Mean and 95% normal-approximation half-width across seeds at each report
/// time. All seeds must share report times.
Aggregate aggregate(const std::vector<SeedResult>& results);

/// Writes trace_seed<k>.csv and regret_seed<k>.csv per seed and summary.json
/// into `out_dir`; returns the summary document.
nlohmann::json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Bound report at slot t: both bounds plus the measured regret across the
/// configured seeds (runs each seed to horizon t).
nlohmann::json bounds_report(const ExperimentConfig& config, Slot t);

/// Parameters in force at slot t for the config's policy.
std::function<PolicyParams(Slot)> params_schedule(const PolicySpec& policy);

}  // namespace rmab
