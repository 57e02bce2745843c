#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rmab/rng.hpp"

namespace rmab {

// Arm and player ids are 1-based throughout the policy API.
using ArmId = int;
using PlayerId = int;
using Slot = std::int64_t;

/// k ⊘ l = ((k - 1) mod l) + 1, a value in 1..l. Requires k, l >= 1.
std::int64_t oslash(std::int64_t k, std::int64_t l);

/// UCB index: sample_mean + sqrt(L ln t / plays). Requires plays >= 1, t >= 2
/// (t >= 1 is accepted; ln 1 = 0) and L >= 0.
double ucb_index(double sample_mean, std::int64_t plays, double t, double L);

/// Time each arm has spent in the first n_explore exploration epochs.
double exploration_time(int n_explore);

/// Whether (4^n_O - 1)/3 > D ln t, i.e. the exploration record is long enough
/// to start an exploitation epoch.
bool exploration_sufficient(int n_explore, double t, double D);

/// Arm played by player k in subepoch m of an exploitation epoch:
/// ranked[(m - k + M + 1) ⊘ M] with M = ranked.size().
ArmId exploitation_assignment(PlayerId k, int m, std::span<const ArmId> ranked);

/// Arm played by player k in subepoch m of an exploration epoch over N arms.
ArmId exploration_assignment(PlayerId k, int m, int num_arms);

/// The M arms with the highest indexes, best first; ties go to the lower id.
std::vector<ArmId> select_top_m(std::span<const double> indexes, int m);

enum class EpochType { Exploration, Exploitation };
std::string to_string(EpochType type);

enum class Coordination { PreAgreement, NoPreAgreement };
std::string to_string(Coordination mode);
Coordination coordination_from_string(const std::string& name);

struct EpochRecord {
  EpochType type;
  int number = 0;  // n for the n-th epoch of this type
  Slot start = 0;
  Slot length = 0;

  Slot end() const { return start + length - 1; }
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct PolicyParams {
  double L = 0.0;
  double D = 0.0;
};

struct FixedParams {
  double L = 0.0;
  double D = 0.0;

  friend bool operator==(const FixedParams&, const FixedParams&) = default;
};

/// Growing parameters D(t) = f(t)^a, L(t) = f(t)^b with 0 < b < a < 1, so
/// that L -> inf, f/D -> inf and D/L -> inf. f must be positive and
/// increasing; a decrease between two queried points raises ConfigError.
class AdaptiveSchedule {
 public:
  using Function = std::function<double(double)>;

  AdaptiveSchedule(std::string f_name = "ln", double d_exponent = 2.0 / 3.0, double l_exponent = 1.0 / 3.0);
  AdaptiveSchedule(std::string f_name, Function f, double d_exponent, double l_exponent);

  PolicyParams at(double t);

  double f(double t) const { return f_(t); }
  const std::string& f_name() const noexcept { return f_name_; }
  double d_exponent() const noexcept { return d_exponent_; }
  double l_exponent() const noexcept { return l_exponent_; }

 private:
  std::string f_name_;
  Function f_;
  double d_exponent_;
  double l_exponent_;
  double last_t_ = 0.0;
  double last_f_ = 0.0;
};

/// Named f-schedules accepted by the config: "ln" (ln t) and "sqrt_ln".
AdaptiveSchedule::Function f_schedule_by_name(const std::string& name);

/// (L(t), D(t)) under the adaptive schedule.
PolicyParams adaptive_params(double t, AdaptiveSchedule& schedule);

using ParamMode = std::variant<FixedParams, AdaptiveSchedule>;

struct PlayerConfig {
  PlayerId id = 1;
  int num_arms = 1;
  int num_players = 1;
  Coordination coordination = Coordination::PreAgreement;
  ParamMode params = FixedParams{};
  /// Test hook: use this ranking at every exploitation epoch instead of the
  /// index ranking.
  std::optional<std::vector<ArmId>> forced_ranking;
};

/// What a player learns about its own play after a slot.
struct Feedback {
  ArmId arm = 0;
  double observed_state = 0.0;
  bool collision = false;
};

/// One decentralized RUCB player. Drive it with choose(t) / observe(feedback)
/// alternately, t = 1, 2, ... in the player's local clock; step() combines
/// both.
class RucbPlayer {
 public:
  explicit RucbPlayer(PlayerConfig config);

  /// Consumes feedback for the previous slot (if any) and returns the arm to
  /// play at local slot t.
  ArmId step(Slot t, const std::optional<Feedback>& previous, Rng& rng);

  ArmId choose(Slot t, Rng& rng);
  void observe(const Feedback& feedback);

  PlayerId id() const noexcept { return config_.id; }
  int num_arms() const noexcept { return config_.num_arms; }
  Coordination coordination() const noexcept { return config_.coordination; }

  const std::vector<std::int64_t>& sample_count() const noexcept { return count_; }
  const std::vector<double>& sample_sum() const noexcept { return sum_; }
  double sample_mean(ArmId arm) const;
  /// Plays of each arm made during exploration epochs.
  const std::vector<std::int64_t>& exploration_count() const noexcept { return explore_count_; }

  int explorations_started() const noexcept { return n_explore_; }
  int exploitations_started() const noexcept { return n_exploit_; }

  EpochType epoch_type() const noexcept { return epoch_.type; }
  int subepoch() const noexcept { return subepoch_; }
  Slot slot_in_subepoch() const noexcept { return slot_in_sub_; }
  const std::vector<ArmId>& ranked_arms() const noexcept { return ranked_; }
  std::optional<ArmId> current_target() const noexcept { return target_; }
  const std::vector<EpochRecord>& epoch_log() const noexcept { return log_; }
  Slot last_slot() const noexcept { return last_t_; }
  /// Parameters in force at the most recent epoch decision.
  PolicyParams current_params() const noexcept { return params_now_; }

 private:
  PolicyParams params_at(double t);
  void start_epoch(Slot t, Rng& rng);
  void rank_arms(Slot t, Rng& rng);
  ArmId draw_target(Rng& rng);

  PlayerConfig config_;
  std::vector<std::int64_t> count_;
  std::vector<double> sum_;
  std::vector<std::int64_t> explore_count_;
  int n_explore_ = 0;
  int n_exploit_ = 0;

  EpochRecord epoch_{EpochType::Exploration, 0, 0, 0};
  Slot sub_length_ = 0;
  int subepoch_ = 0;
  Slot slot_in_sub_ = 0;
  std::vector<ArmId> ranked_;
  std::optional<ArmId> target_;
  bool collided_ = false;  // collision seen in the previous exploitation slot

  std::vector<EpochRecord> log_;
  PolicyParams params_now_{};
  Slot last_t_ = 0;
  std::optional<ArmId> pending_;  // arm awaiting feedback
};

}  // namespace rmab
