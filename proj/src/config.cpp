#include "rmab/config.hpp"

#include <cstdio>
#include <fstream>

#include "rmab/errors.hpp"

namespace rmab {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

ArmSpec parse_arm(const json& doc, const std::string& path) {
  ArmSpec arm;
  arm.states = as_vector(require(doc, "states", path), join(path, "states"));
  const auto& kernel = require(doc, "kernel", path);
  if (!kernel.is_array()) throw ConfigError(join(path, "kernel"), "expected an array of rows");
  for (std::size_t r = 0; r < kernel.size(); ++r)
    arm.kernel.push_back(as_vector(kernel[r], join(path, "kernel") + "[" + std::to_string(r) + "]"));
  if (auto it = doc.find("passive_mode"); it != doc.end()) {
    try {
      arm.passive_mode = passive_mode_from_string(as_string(*it, join(path, "passive_mode")));
    } catch (const ArgumentError& e) {
      throw ConfigError(join(path, "passive_mode"), e.what());
    }
  }
  if (auto it = doc.find("initial_state"); it != doc.end() && !it->is_null()) {
    const auto idx = as_integer(*it, join(path, "initial_state"));
    if (idx < 0) throw ConfigError(join(path, "initial_state"), "must be >= 0");
    arm.initial_state = static_cast<std::size_t>(idx);
  }
  return arm;
}

PolicySpec parse_policy(const json& doc) {
  const std::string path = "policy";
  PolicySpec policy;
  if (auto it = doc.find("mode"); it != doc.end()) {
    try {
      policy.mode = coordination_from_string(as_string(*it, "policy.mode"));
    } catch (const ArgumentError& e) {
      throw ConfigError("policy.mode", e.what());
    }
  }
  const auto& params = require(doc, "params", path);
  if (params.contains("fixed") == params.contains("adaptive"))
    throw ConfigError("policy.params", "expected exactly one of 'fixed' or 'adaptive'");
  if (params.contains("fixed")) {
    const auto& fixed = params["fixed"];
    FixedParams p{as_number(require(fixed, "L", "policy.params.fixed"), "policy.params.fixed.L"),
                  as_number(require(fixed, "D", "policy.params.fixed"), "policy.params.fixed.D")};
    if (p.L < 0.0 || p.D < 0.0) throw ConfigError("policy.params.fixed", "L and D must be >= 0");
    policy.params = p;
  } else {
    const auto& adaptive = params["adaptive"];
    if (!adaptive.is_object()) throw ConfigError("policy.params.adaptive", "expected an object");
    AdaptiveSpec spec;
    if (auto it = adaptive.find("f"); it != adaptive.end()) spec.f = as_string(*it, "policy.params.adaptive.f");
    if (auto it = adaptive.find("a"); it != adaptive.end()) spec.a = as_number(*it, "policy.params.adaptive.a");
    if (auto it = adaptive.find("b"); it != adaptive.end()) spec.b = as_number(*it, "policy.params.adaptive.b");
    policy.params = spec;
  }
  return policy;
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  ExperimentConfig config;
  const auto& arms = require(doc, "arms", "");
  if (!arms.is_array() || arms.empty()) throw ConfigError("arms", "expected a non-empty array");
  for (std::size_t i = 0; i < arms.size(); ++i) config.arms.push_back(parse_arm(arms[i], "arms[" + std::to_string(i) + "]"));

  config.num_players = static_cast<int>(as_integer(require(doc, "M", ""), "M"));
  config.horizon = as_integer(require(doc, "horizon", ""), "horizon");
  if (auto it = doc.find("collision_model"); it != doc.end()) {
    try {
      config.collision = collision_model_from_string(as_string(*it, "collision_model"));
    } catch (const ArgumentError& e) {
      throw ConfigError("collision_model", e.what());
    }
  }
  config.policy = parse_policy(require(doc, "policy", ""));

  if (auto it = doc.find("seeds"); it != doc.end()) {
    if (it->is_array()) {
      config.seeds.clear();
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto s = as_integer((*it)[i], "seeds[" + std::to_string(i) + "]");
        if (s < 0) throw ConfigError("seeds[" + std::to_string(i) + "]", "must be >= 0");
        config.seeds.push_back(static_cast<std::uint64_t>(s));
      }
    } else {
      const auto count = as_integer(*it, "seeds");
      if (count < 0) throw ConfigError("seeds", "must be >= 0");
      config.seeds = seed_range(static_cast<std::uint64_t>(count));
    }
  }
  if (auto it = doc.find("output_dir"); it != doc.end()) config.output_dir = as_string(*it, "output_dir");
  if (auto it = doc.find("report_every"); it != doc.end()) {
    config.report_every = as_integer(*it, "report_every");
    if (config.report_every < 0) throw ConfigError("report_every", "must be >= 0");
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& config) {
  json arms = json::array();
  for (const auto& arm : config.arms) {
    json a{{"states", arm.states}, {"kernel", arm.kernel}, {"passive_mode", std::string(to_string(arm.passive_mode))}};
    if (arm.initial_state) a["initial_state"] = *arm.initial_state;
    arms.push_back(std::move(a));
  }
  json params;
  if (const auto* fixed = std::get_if<FixedParams>(&config.policy.params)) {
    params["fixed"] = {{"L", fixed->L}, {"D", fixed->D}};
  } else {
    const auto& adaptive = std::get<AdaptiveSpec>(config.policy.params);
    params["adaptive"] = {{"f", adaptive.f}, {"a", adaptive.a}, {"b", adaptive.b}};
  }
  return json{{"arms", arms},
              {"M", config.num_players},
              {"horizon", config.horizon},
              {"collision_model", to_string(config.collision)},
              {"policy", {{"mode", to_string(config.policy.mode)}, {"params", params}}},
              {"seeds", config.seeds},
              {"output_dir", config.output_dir},
              {"report_every", config.report_every}};
}

std::vector<ArmModel> build_arms(const ExperimentConfig& config) {
  std::vector<ArmModel> arms;
  for (std::size_t i = 0; i < config.arms.size(); ++i) {
    const auto& spec = config.arms[i];
    const std::string path = "arms[" + std::to_string(i) + "]";
    const auto n = static_cast<Eigen::Index>(spec.kernel.size());
    Eigen::MatrixXd kernel(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(spec.kernel[static_cast<std::size_t>(r)].size()) != n)
        throw ConfigError(path + ".kernel", "transition matrix must be square");
      for (Eigen::Index c = 0; c < n; ++c) kernel(r, c) = spec.kernel[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    try {
      arms.emplace_back(spec.states, kernel, spec.passive_mode, spec.initial_state);
    } catch (const ValidationError& e) {
      throw ConfigError(path, e.what());
    }
  }
  return arms;
}

void validate(const ExperimentConfig& config) {
  if (config.arms.empty()) throw ConfigError("arms", "need at least one arm");
  const auto n = static_cast<int>(config.arms.size());
  if (config.num_players < 1) throw ConfigError("M", "need at least one player");
  if (config.num_players > n) throw ConfigError("M", "more players than arms (M > N)");
  if (config.horizon < n) throw ConfigError("horizon", "must be at least N");
  if (config.seeds.empty()) throw ConfigError("seeds", "need at least one seed");
  if (const auto* adaptive = std::get_if<AdaptiveSpec>(&config.policy.params)) {
    (void)f_schedule_by_name(adaptive->f);
    if (!(adaptive->b > 0.0 && adaptive->a > adaptive->b && adaptive->a < 1.0))
      throw ConfigError("policy.params.adaptive", "exponents must satisfy 0 < b < a < 1");
  }
  (void)build_arms(config);
}

std::string config_digest(const ExperimentConfig& config) {
  json semantic = to_json(config);
  semantic.erase("seeds");
  semantic.erase("output_dir");
  semantic.erase("report_every");
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a(semantic.dump())));
  return buf;
}

ParamMode build_param_mode(const PolicySpec& policy) {
  if (const auto* fixed = std::get_if<FixedParams>(&policy.params)) return *fixed;
  const auto& adaptive = std::get<AdaptiveSpec>(policy.params);
  return AdaptiveSchedule(adaptive.f, adaptive.a, adaptive.b);
}

SimulationSpec make_simulation_spec(const ExperimentConfig& config) {
  SimulationSpec spec;
  spec.arms = build_arms(config);
  spec.num_players = config.num_players;
  spec.horizon = config.horizon;
  spec.collision = config.collision;
  spec.coordination = config.policy.mode;
  spec.params = build_param_mode(config.policy);
  spec.config_digest = config_digest(config);
  return spec;
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= count; ++s) seeds.push_back(s);
  return seeds;
}

}  // namespace rmab
