#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rmab/arm_model.hpp"
#include "rmab/environment.hpp"
#include "rmab/policy.hpp"

namespace rmab {

struct ArmSpec {
  std::vector<double> states;
  std::vector<std::vector<double>> kernel;
  PassiveMode passive_mode = PassiveMode::Frozen;
  std::optional<std::size_t> initial_state;

  friend bool operator==(const ArmSpec&, const ArmSpec&) = default;
};

struct AdaptiveSpec {
  std::string f = "ln";
  double a = 2.0 / 3.0;  // D(t) = f(t)^a
  double b = 1.0 / 3.0;  // L(t) = f(t)^b

  friend bool operator==(const AdaptiveSpec&, const AdaptiveSpec&) = default;
};

struct PolicySpec {
  Coordination mode = Coordination::PreAgreement;
  std::variant<FixedParams, AdaptiveSpec> params = FixedParams{};

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Everything needed to reproduce a seed sweep. See README for the file
/// format; parse(to_json(c)) == c.
struct ExperimentConfig {
  std::vector<ArmSpec> arms;
  int num_players = 1;
  Slot horizon = 0;
  CollisionModel collision = CollisionModel::Share;
  PolicySpec policy;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  Slot report_every = 0;  // 0: epoch ends and powers of two

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates. Errors are ConfigError with the field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Checks the cross-field invariants (M <= N, horizon >= N, non-empty seeds)
/// and that every arm is a valid model.
void validate(const ExperimentConfig& config);

/// Hash of the fields that determine a run's behaviour: arms, M, horizon,
/// collision model and policy. Seeds, output directory and report cadence
/// are excluded.
std::string config_digest(const ExperimentConfig& config);

std::vector<ArmModel> build_arms(const ExperimentConfig& config);
ParamMode build_param_mode(const PolicySpec& policy);
SimulationSpec make_simulation_spec(const ExperimentConfig& config);

/// Seeds 1..count.
std::vector<std::uint64_t> seed_range(std::uint64_t count);

}  // namespace rmab
