#include "rmab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rmab/errors.hpp"

namespace rmab {

namespace {

Slot pow4(int exponent) {
  if (exponent < 0 || exponent > 30) throw ArgumentError("epoch number out of supported range");
  return Slot{1} << (2 * exponent);
}

}  // namespace

std::int64_t oslash(std::int64_t k, std::int64_t l) {
  if (k < 1 || l < 1) throw ArgumentError("oslash requires k >= 1 and l >= 1");
  return (k - 1) % l + 1;
}

double ucb_index(double sample_mean, std::int64_t plays, double t, double L) {
  if (plays < 1) throw ArgumentError("index queried for an arm with no plays");
  if (t < 1.0) throw ArgumentError("index requires t >= 1");
  if (L < 0.0) throw ArgumentError("index requires L >= 0");
  return sample_mean + std::sqrt(L * std::log(t) / static_cast<double>(plays));
}

double exploration_time(int n_explore) { return (std::pow(4.0, n_explore) - 1.0) / 3.0; }

bool exploration_sufficient(int n_explore, double t, double D) {
  return exploration_time(n_explore) > D * std::log(t);
}

ArmId exploitation_assignment(PlayerId k, int m, std::span<const ArmId> ranked) {
  const auto num = static_cast<int>(ranked.size());
  if (num < 1) throw ArgumentError("empty ranking");
  if (k < 1 || k > num) throw ArgumentError("player id out of range 1..M");
  if (m < 1 || m > num) throw ArgumentError("subepoch index out of range 1..M");
  return ranked[static_cast<std::size_t>(oslash(m - k + num + 1, num) - 1)];
}

ArmId exploration_assignment(PlayerId k, int m, int num_arms) {
  if (num_arms < 1) throw ArgumentError("need at least one arm");
  if (k < 1 || k > num_arms) throw ArgumentError("player id out of range 1..N");
  if (m < 1 || m > num_arms) throw ArgumentError("subepoch index out of range 1..N");
  return static_cast<ArmId>(oslash(m - k + num_arms + 1, num_arms));
}

std::vector<ArmId> select_top_m(std::span<const double> indexes, int m) {
  if (m < 0 || static_cast<std::size_t>(m) > indexes.size()) throw ArgumentError("M must be in 0..N");
  std::vector<ArmId> order(indexes.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](ArmId a, ArmId b) {
    return indexes[static_cast<std::size_t>(a - 1)] > indexes[static_cast<std::size_t>(b - 1)];
  });
  order.resize(static_cast<std::size_t>(m));
  return order;
}

std::string to_string(EpochType type) { return type == EpochType::Exploration ? "exploration" : "exploitation"; }

std::string to_string(Coordination mode) {
  return mode == Coordination::PreAgreement ? "pre_agreement" : "no_pre_agreement";
}

Coordination coordination_from_string(const std::string& name) {
  if (name == "pre_agreement") return Coordination::PreAgreement;
  if (name == "no_pre_agreement") return Coordination::NoPreAgreement;
  throw ArgumentError("unknown coordination mode '" + name + "'");
}

AdaptiveSchedule::Function f_schedule_by_name(const std::string& name) {
  if (name == "ln") return [](double t) { return std::log(t); };
  if (name == "sqrt_ln") return [](double t) { return std::sqrt(std::log(t)); };
  throw ConfigError("policy.params.adaptive.f", "unknown f-schedule '" + name + "'");
}

AdaptiveSchedule::AdaptiveSchedule(std::string f_name, double d_exponent, double l_exponent)
    : AdaptiveSchedule(f_name, f_schedule_by_name(f_name), d_exponent, l_exponent) {}

AdaptiveSchedule::AdaptiveSchedule(std::string f_name, Function f, double d_exponent, double l_exponent)
    : f_name_(std::move(f_name)), f_(std::move(f)), d_exponent_(d_exponent), l_exponent_(l_exponent) {
  // L = f^b -> inf needs b > 0, D/L = f^(a-b) -> inf needs a > b, f/D -> inf needs a < 1.
  if (!(l_exponent_ > 0.0 && d_exponent_ > l_exponent_ && d_exponent_ < 1.0))
    throw ConfigError("policy.params.adaptive", "exponents must satisfy 0 < b < a < 1");
}

PolicyParams AdaptiveSchedule::at(double t) {
  if (t < 2.0) throw ArgumentError("adaptive parameters require t >= 2");
  const double value = f_(t);
  if (!(value > 0.0)) throw ConfigError("policy.params.adaptive.f", "f(t) must be positive");
  if (t > last_t_ && last_t_ > 0.0 && value < last_f_)
    throw ConfigError("policy.params.adaptive.f", "f-schedule is not increasing");
  if (t > last_t_) {
    last_t_ = t;
    last_f_ = value;
  }
  return {std::pow(value, l_exponent_), std::pow(value, d_exponent_)};
}

PolicyParams adaptive_params(double t, AdaptiveSchedule& schedule) { return schedule.at(t); }

RucbPlayer::RucbPlayer(PlayerConfig config) : config_(std::move(config)) {
  const int n = config_.num_arms;
  const int m = config_.num_players;
  if (n < 1 || m < 1 || m > n) throw ConfigError("M", "need 1 <= M <= N");
  if (config_.id < 1 || config_.id > m) throw ArgumentError("player id out of range 1..M");
  if (const auto* fixed = std::get_if<FixedParams>(&config_.params)) {
    if (fixed->L < 0.0 || fixed->D < 0.0) throw ConfigError("policy.params.fixed", "L and D must be >= 0");
    params_now_ = {fixed->L, fixed->D};
  }
  if (config_.forced_ranking) {
    auto sorted = *config_.forced_ranking;
    std::sort(sorted.begin(), sorted.end());
    if (static_cast<int>(sorted.size()) != m || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
        sorted.front() < 1 || sorted.back() > n)
      throw ArgumentError("forced ranking must list M distinct arms");
  }
  count_.assign(static_cast<std::size_t>(n), 0);
  sum_.assign(static_cast<std::size_t>(n), 0.0);
  explore_count_.assign(static_cast<std::size_t>(n), 0);
}

double RucbPlayer::sample_mean(ArmId arm) const {
  const auto i = static_cast<std::size_t>(arm - 1);
  return count_.at(i) > 0 ? sum_[i] / static_cast<double>(count_[i]) : 0.0;
}

PolicyParams RucbPlayer::params_at(double t) {
  if (const auto* fixed = std::get_if<FixedParams>(&config_.params)) return {fixed->L, fixed->D};
  return std::get<AdaptiveSchedule>(config_.params).at(t);
}

ArmId RucbPlayer::draw_target(Rng& rng) { return ranked_[rng.index(ranked_.size())]; }

void RucbPlayer::rank_arms(Slot t, Rng& rng) {
  if (config_.forced_ranking) {
    ranked_ = *config_.forced_ranking;
  } else {
    std::vector<double> indexes(count_.size());
    for (std::size_t i = 0; i < count_.size(); ++i)
      indexes[i] = ucb_index(sum_[i] / static_cast<double>(count_[i]), count_[i], static_cast<double>(t),
                             params_now_.L);
    ranked_ = select_top_m(indexes, config_.num_players);
  }
  if (config_.coordination == Coordination::NoPreAgreement) {
    const bool kept = target_ && std::find(ranked_.begin(), ranked_.end(), *target_) != ranked_.end();
    if (!kept || collided_) target_ = draw_target(rng);
  }
}

void RucbPlayer::start_epoch(Slot t, Rng& rng) {
  bool exploit = false;
  if (n_explore_ > 0) {
    params_now_ = params_at(static_cast<double>(t));
    exploit = exploration_sufficient(n_explore_, static_cast<double>(t), params_now_.D);
  }
  subepoch_ = 1;
  slot_in_sub_ = 0;
  if (exploit) {
    ++n_exploit_;
    sub_length_ = 2 * pow4(n_exploit_ - 1);
    epoch_ = {EpochType::Exploitation, n_exploit_, t, sub_length_ * config_.num_players};
    rank_arms(t, rng);
  } else {
    ++n_explore_;
    sub_length_ = pow4(n_explore_ - 1);
    epoch_ = {EpochType::Exploration, n_explore_, t, sub_length_ * config_.num_arms};
  }
  collided_ = false;
  log_.push_back(epoch_);
}

ArmId RucbPlayer::choose(Slot t, Rng& rng) {
  if (pending_) throw ProtocolError("missing feedback for slot " + std::to_string(last_t_));
  if (t != last_t_ + 1) throw ProtocolError("slots must be stepped consecutively from 1");

  if (epoch_.length == 0 || t > epoch_.end()) {
    start_epoch(t, rng);
  } else if (++slot_in_sub_ == sub_length_) {
    ++subepoch_;
    slot_in_sub_ = 0;
  }

  ArmId arm = 0;
  if (epoch_.type == EpochType::Exploration) {
    arm = exploration_assignment(config_.id, subepoch_, config_.num_arms);
    ++explore_count_[static_cast<std::size_t>(arm - 1)];
  } else if (config_.coordination == Coordination::PreAgreement) {
    arm = exploitation_assignment(config_.id, subepoch_, ranked_);
  } else {
    if (collided_) target_ = draw_target(rng);
    arm = *target_;
  }
  pending_ = arm;
  last_t_ = t;
  return arm;
}

void RucbPlayer::observe(const Feedback& feedback) {
  if (!pending_) throw ProtocolError("feedback received but no arm is awaiting it");
  if (feedback.arm != *pending_)
    throw ProtocolError("feedback references arm " + std::to_string(feedback.arm) + " but arm " +
                        std::to_string(*pending_) + " was played");
  const auto i = static_cast<std::size_t>(feedback.arm - 1);
  ++count_[i];
  sum_[i] += feedback.observed_state;
  collided_ = epoch_.type == EpochType::Exploitation && feedback.collision;
  pending_.reset();
}

ArmId RucbPlayer::step(Slot t, const std::optional<Feedback>& previous, Rng& rng) {
  if (previous) observe(*previous);
  return choose(t, rng);
}

}  // namespace rmab
