#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rmab/arm_model.hpp"
#include "rmab/policy.hpp"
#include "rmab/rng.hpp"

namespace rmab {

/// How a reward is credited when several players activate the same arm.
enum class CollisionModel {
  Share,  // colliding players split the state value equally
  Zero,   // nobody on a contested arm is rewarded
};

std::string to_string(CollisionModel model);
CollisionModel collision_model_from_string(const std::string& name);

struct SlotRecord {
  Slot t = 0;
  std::vector<ArmId> choices;         // per player; 0 when the player is absent
  std::vector<double> arm_states;     // per arm, value at slot t before evolving
  std::vector<int> collisions;        // per arm, number of players on it
  std::vector<double> player_rewards; // per player
  double system_reward = 0.0;
};

struct SlotOutcome {
  SlotRecord record;
  std::vector<std::optional<Feedback>> feedback;  // per player
};

/// Resolves one slot. Every chosen arm is read and then takes one active step;
/// the rest take one passive step. Arms evolve in id order, which fixes the
/// RNG draw order. Throws ProtocolError for a choice outside 0..N.
void resolve_slot(Slot t, std::span<const ArmId> choices, std::span<ArmModel> arms, CollisionModel model, Rng& rng,
                  SlotOutcome& out);
SlotOutcome resolve_slot(Slot t, std::span<const ArmId> choices, std::span<ArmModel> arms, CollisionModel model,
                         Rng& rng);

/// Global slots (inclusive) during which a player is active. A player joins
/// at `join` and starts its own schedule at local slot 1; during an absence it
/// is neither stepped nor advanced.
struct Presence {
  Slot join = 1;
  std::vector<std::pair<Slot, Slot>> absences;

  bool active_at(Slot t) const;
};

struct SimulationSpec {
  std::vector<ArmModel> arms;
  int num_players = 1;
  Slot horizon = 0;
  CollisionModel collision = CollisionModel::Share;
  Coordination coordination = Coordination::PreAgreement;
  ParamMode params = FixedParams{};
  std::vector<Presence> presence;  // empty: everybody present throughout
  std::optional<std::vector<ArmId>> forced_ranking;
  std::string config_digest;
};

struct SimulationTrace {
  std::vector<SlotRecord> records;
  std::uint64_t seed = 0;
  std::string config_digest;
};

/// Slot-by-slot driver. Within a slot all present players choose (by id)
/// before any outcome is resolved.
class Simulation {
 public:
  Simulation(SimulationSpec spec, std::uint64_t seed);

  bool done() const noexcept { return t_ >= spec_.horizon; }
  Slot slot() const noexcept { return t_; }

  /// Advances one slot; the reference stays valid until the next call.
  const SlotRecord& step();

  const std::vector<RucbPlayer>& players() const noexcept { return players_; }
  const std::vector<ArmModel>& arms() const noexcept { return spec_.arms; }
  const SimulationSpec& spec() const noexcept { return spec_; }

 private:
  SimulationSpec spec_;
  Rng rng_;
  std::vector<RucbPlayer> players_;
  std::vector<Slot> local_t_;
  std::vector<ArmId> choices_;
  SlotOutcome outcome_;
  Slot t_ = 0;
};

/// Runs the whole horizon and keeps every slot.
SimulationTrace run(const SimulationSpec& spec, std::uint64_t seed);

/// T_j(t): per arm, the number of slots in 1..t in which it was activated.
std::vector<std::int64_t> activation_counts(const SimulationTrace& trace, Slot t);

}  // namespace rmab
