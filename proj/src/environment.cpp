#include "rmab/environment.hpp"

#include <algorithm>

#include "rmab/errors.hpp"

namespace rmab {

std::string to_string(CollisionModel model) { return model == CollisionModel::Share ? "share" : "zero"; }

CollisionModel collision_model_from_string(const std::string& name) {
  if (name == "share") return CollisionModel::Share;
  if (name == "zero") return CollisionModel::Zero;
  throw ArgumentError("unknown collision model '" + name + "'");
}

void resolve_slot(Slot t, std::span<const ArmId> choices, std::span<ArmModel> arms, CollisionModel model, Rng& rng,
                  SlotOutcome& out) {
  const auto n = static_cast<ArmId>(arms.size());
  auto& rec = out.record;
  rec.t = t;
  rec.choices.assign(choices.begin(), choices.end());
  rec.collisions.assign(arms.size(), 0);
  rec.arm_states.resize(arms.size());
  rec.player_rewards.assign(choices.size(), 0.0);
  rec.system_reward = 0.0;
  out.feedback.assign(choices.size(), std::nullopt);

  for (ArmId c : choices) {
    if (c < 0 || c > n) throw ProtocolError("choice " + std::to_string(c) + " outside arms 1.." + std::to_string(n));
    if (c > 0) ++rec.collisions[static_cast<std::size_t>(c - 1)];
  }
  for (std::size_t j = 0; j < arms.size(); ++j) {
    rec.arm_states[j] = arms[j].current_value();
    const int players_on = rec.collisions[j];
    if (players_on == 0) continue;
    if (model == CollisionModel::Share || players_on == 1) rec.system_reward += rec.arm_states[j];
  }
  for (std::size_t k = 0; k < choices.size(); ++k) {
    const ArmId c = choices[k];
    if (c == 0) continue;
    const auto j = static_cast<std::size_t>(c - 1);
    const int players_on = rec.collisions[j];
    const double state = rec.arm_states[j];
    if (model == CollisionModel::Share) {
      rec.player_rewards[k] = state / players_on;
    } else {
      rec.player_rewards[k] = players_on == 1 ? state : 0.0;
    }
    out.feedback[k] = Feedback{c, state, players_on > 1};
  }
  for (std::size_t j = 0; j < arms.size(); ++j) arms[j].evolve(rec.collisions[j] > 0, rng);
}

SlotOutcome resolve_slot(Slot t, std::span<const ArmId> choices, std::span<ArmModel> arms, CollisionModel model,
                         Rng& rng) {
  SlotOutcome out;
  resolve_slot(t, choices, arms, model, rng, out);
  return out;
}

bool Presence::active_at(Slot t) const {
  if (t < join) return false;
  return std::none_of(absences.begin(), absences.end(),
                      [t](const auto& gap) { return gap.first <= t && t <= gap.second; });
}

Simulation::Simulation(SimulationSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
  const int n = static_cast<int>(spec_.arms.size());
  if (n < 1) throw ConfigError("arms", "need at least one arm");
  if (spec_.num_players < 1 || spec_.num_players > n) throw ConfigError("M", "need 1 <= M <= N");
  if (spec_.horizon < 0) throw ConfigError("horizon", "must be non-negative");
  if (!spec_.presence.empty() && static_cast<int>(spec_.presence.size()) != spec_.num_players)
    throw ConfigError("presence", "one entry per player required");

  for (int k = 1; k <= spec_.num_players; ++k) {
    PlayerConfig config;
    config.id = k;
    config.num_arms = n;
    config.num_players = spec_.num_players;
    config.coordination = spec_.coordination;
    config.params = spec_.params;
    config.forced_ranking = spec_.forced_ranking;
    players_.emplace_back(std::move(config));
  }
  local_t_.assign(players_.size(), 0);
  choices_.assign(players_.size(), 0);
  for (auto& arm : spec_.arms) arm.reset(rng_);
}

const SlotRecord& Simulation::step() {
  ++t_;
  for (std::size_t k = 0; k < players_.size(); ++k) {
    const bool active = spec_.presence.empty() || spec_.presence[k].active_at(t_);
    choices_[k] = active ? players_[k].choose(++local_t_[k], rng_) : 0;
  }
  resolve_slot(t_, choices_, spec_.arms, spec_.collision, rng_, outcome_);
  for (std::size_t k = 0; k < players_.size(); ++k)
    if (outcome_.feedback[k]) players_[k].observe(*outcome_.feedback[k]);
  return outcome_.record;
}

SimulationTrace run(const SimulationSpec& spec, std::uint64_t seed) {
  SimulationTrace trace;
  trace.seed = seed;
  trace.config_digest = spec.config_digest;
  Simulation sim(spec, seed);
  trace.records.reserve(static_cast<std::size_t>(spec.horizon));
  while (!sim.done()) trace.records.push_back(sim.step());
  return trace;
}

std::vector<std::int64_t> activation_counts(const SimulationTrace& trace, Slot t) {
  std::vector<std::int64_t> counts;
  if (!trace.records.empty()) counts.assign(trace.records.front().collisions.size(), 0);
  for (const auto& rec : trace.records) {
    if (rec.t > t) break;
    for (std::size_t j = 0; j < rec.collisions.size(); ++j) counts[j] += rec.collisions[j] > 0 ? 1 : 0;
  }
  return counts;
}

}  // namespace rmab
