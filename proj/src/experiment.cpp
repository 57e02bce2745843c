#include "rmab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "rmab/errors.hpp"

namespace rmab {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_power_of_two(Slot t) { return t > 0 && (t & (t - 1)) == 0; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("I/O error: cannot write " + path.string());
  return out;
}

json epoch_log_json(const std::vector<EpochRecord>& log) {
  json out = json::array();
  for (const auto& e : log)
    out.push_back({{"type", to_string(e.type)}, {"number", e.number}, {"start", e.start}, {"length", e.length}});
  return out;
}

}  // namespace

std::function<PolicyParams(Slot)> params_schedule(const PolicySpec& policy) {
  if (const auto* fixed = std::get_if<FixedParams>(&policy.params)) {
    const PolicyParams p{fixed->L, fixed->D};
    return [p](Slot) { return p; };
  }
  const auto spec = std::get<AdaptiveSpec>(policy.params);
  return [spec](Slot t) { return AdaptiveSchedule(spec.f, spec.a, spec.b).at(static_cast<double>(t)); };
}

ParamDerivation derive_params(const ExperimentConfig& config) {
  const auto arms = build_arms(config);
  ParamDerivation d;
  d.system = compute_system_params(arms, config.num_players);
  const auto& mu = d.system.mu_sorted;
  for (std::size_t j = 0; j + 1 < mu.size(); ++j) {
    if (mu[j] - mu[j + 1] <= 1e-12 * std::max(1.0, std::abs(mu[j])))
      throw ValidationError("different arms must have different mu values: arms " +
                            std::to_string(d.system.sigma[j]) + " and " + std::to_string(d.system.sigma[j + 1]) +
                            " share the stationary mean " + fmt_double(mu[j]));
  }
  d.l_threshold = l_threshold(d.system, kLThresholdFactor);
  d.l_threshold_factor7 = l_threshold(d.system, kLThresholdFactorAdaptive);
  d.d_threshold = rmab::d_threshold(d.l_threshold, d.system);
  if (const auto* fixed = std::get_if<FixedParams>(&config.policy.params)) {
    d.configured = *fixed;
    d.d_threshold_for_configured_L = rmab::d_threshold(fixed->L, d.system);
    d.l_valid = fixed->L >= d.l_threshold;
    d.d_valid = fixed->D >= *d.d_threshold_for_configured_L;
  }
  return d;
}

json to_json(const ParamDerivation& d) {
  const auto& s = d.system;
  json out{{"system",
            {{"pi_min", s.pi_min},
             {"eps_min", s.eps_min},
             {"eps_max", s.eps_max},
             {"s_min", s.s_min},
             {"s_max", s.s_max},
             {"smax_cardinality", s.smax_cardinality},
             {"mu", s.mu},
             {"sigma", s.sigma},
             {"gap_min", s.gap_min ? json(*s.gap_min) : json(nullptr)}}},
           {"l_threshold", d.l_threshold},
           {"l_threshold_factor7", d.l_threshold_factor7},
           {"d_threshold", d.d_threshold}};
  if (d.configured) {
    out["configured"] = {{"L", d.configured->L},
                         {"D", d.configured->D},
                         {"d_threshold_for_L", *d.d_threshold_for_configured_L},
                         {"L_valid", d.l_valid},
                         {"D_valid", d.d_valid}};
  }
  out["bounds_binding"] = d.bounds_binding();
  return out;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const RunHooks& hooks, std::ostream* trace_csv) {
  auto spec = make_simulation_spec(config);
  const auto system = compute_system_params(spec.arms, config.num_players);
  Simulation sim(std::move(spec), seed);
  RegretAccumulator acc(system.top_mean_sum());

  SeedResult result;
  result.seed = seed;
  result.player_reward.assign(static_cast<std::size_t>(config.num_players), 0.0);
  if (trace_csv) *trace_csv << "t,player,arm,state,collision,player_reward\n";

  while (!sim.done()) {
    const SlotRecord& rec = sim.step();
    const auto& players = sim.players();
    acc.add(rec.system_reward);

    std::int64_t contested = 0;
    for (int c : rec.collisions) contested += c > 1 ? 1 : 0;
    if (players.front().epoch_type() == EpochType::Exploration) {
      result.collisions_exploration += contested;
    } else {
      result.collisions_exploitation += contested;
    }
    for (std::size_t k = 0; k < rec.choices.size(); ++k) {
      result.player_reward[k] += rec.player_rewards[k];
      if (trace_csv && rec.choices[k] != 0) {
        const auto j = static_cast<std::size_t>(rec.choices[k] - 1);
        *trace_csv << rec.t << ',' << (k + 1) << ',' << rec.choices[k] << ',' << fmt_double(rec.arm_states[j]) << ','
                   << (rec.collisions[j] > 1 ? 1 : 0) << ',' << fmt_double(rec.player_rewards[k]) << '\n';
      }
    }
    if (hooks.on_slot) hooks.on_slot(rec, players);

    const Slot t = rec.t;
    const bool epoch_end = players.front().epoch_log().back().end() == t;
    const bool report = epoch_end || is_power_of_two(t) || t == config.horizon ||
                        (config.report_every > 0 && t % config.report_every == 0) ||
                        (hooks.report_at && hooks.report_at(t));
    if (report) {
      result.report_times.push_back(t);
      result.regret.push_back(acc.regret());
      result.epoch_end.push_back(epoch_end);
    }
  }
  result.total_reward = acc.reward();
  result.epoch_log = sim.players().front().epoch_log();
  return result;
}

std::vector<SeedResult> run_seeds(const ExperimentConfig& config, const RunHooks& hooks) {
  std::vector<SeedResult> results(config.seeds.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(config.seeds.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < results.size(); i = next++) results[i] = run_seed(config, config.seeds[i], hooks);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return results;
}

Aggregate aggregate(const std::vector<SeedResult>& results) {
  Aggregate agg;
  if (results.empty()) return agg;
  agg.times = results.front().report_times;
  agg.epoch_end = results.front().epoch_end;
  const auto n = static_cast<double>(results.size());
  for (std::size_t i = 0; i < agg.times.size(); ++i) {
    double sum = 0.0;
    for (const auto& r : results) {
      if (r.report_times.size() != agg.times.size()) throw std::logic_error("seeds disagree on report times");
      sum += r.regret[i];
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : results) sq += (r.regret[i] - mean) * (r.regret[i] - mean);
    const double sd = results.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
    agg.mean.push_back(mean);
    agg.ci95.push_back(1.96 * sd / std::sqrt(n));
  }
  return agg;
}

json run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("I/O error: cannot create " + out_dir.string() + ": " + ec.message());

  const auto arms = build_arms(config);
  const auto system = compute_system_params(arms, config.num_players);
  const auto schedule = params_schedule(config.policy);

  json derivation = nullptr;
  bool binding = false;
  try {
    const auto d = derive_params(config);
    derivation = to_json(d);
    binding = d.bounds_binding();
    if (d.configured && !binding)
      std::cerr << "warning: L/D below the regret-bound thresholds; bounds are reported as non-binding\n";
  } catch (const ValidationError& e) {
    derivation = {{"error", e.what()}};
  }

  std::vector<SeedResult> results(config.seeds.size());
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    const auto seed = config.seeds[i];
    auto trace = open_output(out_dir / ("trace_seed" + std::to_string(seed) + ".csv"));
    results[i] = run_seed(config, seed, {}, &trace);

    auto series = open_output(out_dir / ("regret_seed" + std::to_string(seed) + ".csv"));
    series << "t,regret,regret_over_ln_t,epoch_end,bound\n";
    const auto& r = results[i];
    for (std::size_t j = 0; j < r.report_times.size(); ++j) {
      const Slot t = r.report_times[j];
      series << t << ',' << fmt_double(r.regret[j]) << ',';
      if (t > 1) series << fmt_double(r.regret[j] / std::log(static_cast<double>(t)));
      series << ',' << (r.epoch_end[j] ? 1 : 0) << ',';
      if (r.epoch_end[j] && t > system.num_arms()) {
        const auto p = schedule(t);
        series << fmt_double(regret_bound(config.collision, t, system, p.L, p.D));
      }
      series << '\n';
    }
  }

  const auto agg = aggregate(results);
  json per_seed = json::array();
  for (const auto& r : results) {
    per_seed.push_back({{"seed", r.seed},
                        {"total_reward", r.total_reward},
                        {"per_player_reward", r.player_reward},
                        {"final_regret", r.regret.empty() ? 0.0 : r.regret.back()},
                        {"collisions", {{"exploration", r.collisions_exploration},
                                        {"exploitation", r.collisions_exploitation}}}});
  }
  json series = json::array();
  json bound_report = json::array();
  for (std::size_t i = 0; i < agg.times.size(); ++i) {
    const Slot t = agg.times[i];
    json row{{"t", t}, {"epoch_end", static_cast<bool>(agg.epoch_end[i])}, {"regret_mean", agg.mean[i]},
             {"regret_ci95", agg.ci95[i]}};
    if (t > system.num_arms()) {
      const auto p = schedule(t);
      const double shared = regret_bound_shared(t, system, p.L, p.D);
      const double zero = regret_bound_zero(t, system, p.L, p.D);
      row["bound"] = config.collision == CollisionModel::Share ? shared : zero;
      if (agg.epoch_end[i]) {
        bound_report.push_back({{"t", t},
                                {"bound_shared", shared},
                                {"bound_zero", zero},
                                {"measured_regret_mean", agg.mean[i]},
                                {"measured_regret_ci95", agg.ci95[i]},
                                {"n_seeds", results.size()}});
      }
    }
    series.push_back(std::move(row));
  }

  json summary{{"config_digest", config_digest(config)},
               {"label", regret_label(arms)},
               {"collision_model", to_string(config.collision)},
               {"coordination", to_string(config.policy.mode)},
               {"horizon", config.horizon},
               {"seeds", config.seeds},
               {"n_seeds", config.seeds.size()},
               {"parameters", derivation},
               {"bounds_binding", binding},
               {"per_seed", per_seed},
               {"series", series},
               {"bound_report", bound_report},
               {"epoch_log", results.empty() ? json::array() : epoch_log_json(results.front().epoch_log)}};
  auto out = open_output(out_dir / "summary.json");
  out << summary.dump(2) << '\n';
  if (!out) throw std::runtime_error("I/O error: failed writing summary.json");
  return summary;
}

json bounds_report(const ExperimentConfig& config, Slot t) {
  const auto arms = build_arms(config);
  const auto system = compute_system_params(arms, config.num_players);
  if (t <= system.num_arms()) throw ArgumentError("bounds require t > N");
  const auto p = params_schedule(config.policy)(t);

  ExperimentConfig sized = config;
  sized.horizon = t;
  const auto results = run_seeds(sized);
  const auto agg = aggregate(results);

  bool binding = false;
  try {
    binding = derive_params(config).bounds_binding();
  } catch (const ValidationError&) {
  }
  return {{"t", t},
          {"bound_shared", regret_bound_shared(t, system, p.L, p.D)},
          {"bound_zero", regret_bound_zero(t, system, p.L, p.D)},
          {"measured_regret_mean", agg.mean.back()},
          {"measured_regret_ci95", agg.ci95.back()},
          {"n_seeds", results.size()},
          {"epoch_end", static_cast<bool>(agg.epoch_end.back())},
          {"bounds_binding", binding}};
}

}  // namespace rmab
