#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmab/arm_model.hpp"
#include "rmab/environment.hpp"
#include "rmab/policy.hpp"

namespace rmab {

/// Leading factor inside the L threshold: 4 for fixed parameters, 7 for the
/// adaptive-schedule variant.
inline constexpr double kLThresholdFactor = 4.0;
inline constexpr double kLThresholdFactorAdaptive = 7.0;

/// System-wide extremes over a set of arms, plus the ranking of the
/// stationary means.
struct SystemParams {
  double pi_min = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  int smax_cardinality = 0;
  int num_players = 0;
  std::vector<double> mu;             // by arm id - 1
  std::vector<int> state_counts;      // |S_j| by arm id - 1
  std::vector<double> lemma1_terms;   // (min_s pi_s)^-1 sum_s s by arm id - 1
  std::vector<ArmId> sigma;           // arm ids, best stationary mean first
  std::vector<double> mu_sorted;      // mu[sigma[i]]
  std::optional<double> gap_min;      // min_{j<=M} mu_sorted[j] - mu_sorted[j+1]; empty when M == N

  int num_arms() const noexcept { return static_cast<int>(mu.size()); }
  /// sum of the M largest stationary means.
  double top_mean_sum() const;
};

SystemParams compute_system_params(std::span<const ArmModel> arms, int num_players);

/// Measured regret r(t) = t * sum_{i<=M} mu_sigma(i) - R(t), at report times.
/// The transient O(1) term is not included.
struct RegretSeries {
  std::string label = "regret";  // "weak regret" if any arm is restless when passive
  std::vector<Slot> times;
  std::vector<double> regret;
  std::vector<bool> epoch_end;
  std::vector<std::optional<double>> bound;  // filled at epoch-end times
};

/// Full per-slot series from a trace.
RegretSeries measured_regret(const SimulationTrace& trace, const SystemParams& params, int num_players);

/// Regret label for a set of arms ("regret" when every arm is Frozen).
std::string regret_label(std::span<const ArmModel> arms);

/// Streaming accumulator of R(t) that samples r(t) when asked.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(double top_mean_sum) : top_(top_mean_sum) {}
  void add(double system_reward) {
    reward_ += system_reward;
    ++t_;
  }
  Slot t() const noexcept { return t_; }
  double reward() const noexcept { return reward_; }
  double regret() const noexcept { return static_cast<double>(t_) * top_ - reward_; }

 private:
  double top_;
  double reward_ = 0.0;
  Slot t_ = 0;
};

/// Minimal L: (1/eps_min) (factor * 20 s_max^2 |S|_max^2 / (3 - 2 sqrt 2) + 10 s_max^2).
double l_threshold(const SystemParams& params, double factor = kLThresholdFactor);

/// Minimal D: 4 L / gap_min^2. Throws ValidationError if the M best means
/// are not separated from the rest (gap undefined or zero).
double d_threshold(double L, const SystemParams& params);

/// Sum over arms of (min_s pi_s)^-1 * sum_s s.
double lemma1_constant(std::span<const ArmModel> arms);
double lemma1_term(const ArmModel& arm);

/// (1/3) [4 (3 D ln t + 1) - 1].
double exploration_time_bound(double t, double D);

/// ceil(log_4(1.5 (t - N) + 1)); requires t > N.
std::int64_t exploitation_count_bound(Slot t, int num_arms);

/// 1 + eps_max sqrt(L) / (10 s_min).
double mistake_factor(const SystemParams& params, double L);

/// Upper bound on the probability that arm i out-ranks arm j at the start of
/// an exploitation epoch beginning at t_n. Clamped to 1.
double inversion_prob_bound(ArmId i, ArmId j, double t_n, const SystemParams& params, double L);

/// The exploration-loss term shared by both bounds.
double exploration_regret_term(double t, const SystemParams& params, double D);

/// Regret bound when colliding players share the reward.
double regret_bound_shared(Slot t, const SystemParams& params, double L, double D);

/// Regret bound when colliding players get nothing. The collision term sums
/// |S_sigma(i)| + |S_sigma(i)| as the closed form is written.
double regret_bound_zero(Slot t, const SystemParams& params, double L, double D);

double regret_bound(CollisionModel model, Slot t, const SystemParams& params, double L, double D);

/// Fills `series.bound` at epoch-end times. For adaptive runs the parameters
/// at each time come from `params_at`.
void attach_bounds(RegretSeries& series, const std::vector<EpochRecord>& epoch_log, const SystemParams& params,
                   CollisionModel model, const std::function<PolicyParams(Slot)>& params_at);

}  // namespace rmab
