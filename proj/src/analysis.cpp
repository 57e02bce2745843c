#include "rmab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmab/errors.hpp"

namespace rmab {

double SystemParams::top_mean_sum() const {
  return std::accumulate(mu_sorted.begin(), mu_sorted.begin() + num_players, 0.0);
}

double lemma1_term(const ArmModel& arm) {
  const double sum = std::accumulate(arm.states().begin(), arm.states().end(), 0.0);
  return sum / arm.summary().pi.minCoeff();
}

double lemma1_constant(std::span<const ArmModel> arms) {
  double total = 0.0;
  for (const auto& arm : arms) total += lemma1_term(arm);
  return total;
}

SystemParams compute_system_params(std::span<const ArmModel> arms, int num_players) {
  const int n = static_cast<int>(arms.size());
  if (n < 1) throw ArgumentError("need at least one arm");
  if (num_players < 1 || num_players > n) throw ArgumentError("need 1 <= M <= N");

  SystemParams p;
  p.num_players = num_players;
  p.pi_min = 1.0;
  p.eps_min = 1.0;
  p.eps_max = 0.0;
  p.s_min = arms[0].states()[0];
  p.s_max = p.s_min;
  for (const auto& arm : arms) {
    const auto& s = arm.summary();
    p.pi_min = std::min(p.pi_min, s.pi.minCoeff());
    p.eps_min = std::min(p.eps_min, s.epsilon);
    p.eps_max = std::max(p.eps_max, s.epsilon);
    const auto [lo, hi] = std::minmax_element(arm.states().begin(), arm.states().end());
    p.s_min = std::min(p.s_min, *lo);
    p.s_max = std::max(p.s_max, *hi);
    p.smax_cardinality = std::max(p.smax_cardinality, static_cast<int>(arm.size()));
    p.mu.push_back(s.mu);
    p.state_counts.push_back(static_cast<int>(arm.size()));
    p.lemma1_terms.push_back(lemma1_term(arm));
  }

  p.sigma.resize(static_cast<std::size_t>(n));
  std::iota(p.sigma.begin(), p.sigma.end(), 1);
  std::stable_sort(p.sigma.begin(), p.sigma.end(), [&](ArmId a, ArmId b) {
    return p.mu[static_cast<std::size_t>(a - 1)] > p.mu[static_cast<std::size_t>(b - 1)];
  });
  for (ArmId id : p.sigma) p.mu_sorted.push_back(p.mu[static_cast<std::size_t>(id - 1)]);

  if (num_players < n) {
    double gap = p.mu_sorted[0] - p.mu_sorted[1];
    for (int j = 1; j < num_players; ++j) gap = std::min(gap, p.mu_sorted[j] - p.mu_sorted[j + 1]);
    p.gap_min = gap;
  }
  return p;
}

std::string regret_label(std::span<const ArmModel> arms) {
  const bool rested = std::all_of(arms.begin(), arms.end(),
                                  [](const ArmModel& a) { return a.passive_mode() == PassiveMode::Frozen; });
  return rested ? "regret" : "weak regret";
}

RegretSeries measured_regret(const SimulationTrace& trace, const SystemParams& params, int num_players) {
  RegretSeries series;
  const double top = std::accumulate(params.mu_sorted.begin(), params.mu_sorted.begin() + num_players, 0.0);
  RegretAccumulator acc(top);
  for (const auto& rec : trace.records) {
    acc.add(rec.system_reward);
    series.times.push_back(rec.t);
    series.regret.push_back(acc.regret());
  }
  series.epoch_end.assign(series.times.size(), false);
  series.bound.assign(series.times.size(), std::nullopt);
  return series;
}

double l_threshold(const SystemParams& params, double factor) {
  if (!(params.eps_min > 0.0)) throw ValidationError("spectral gap is zero: some arm is not ergodic");
  const double s2 = params.s_max * params.s_max;
  const double card2 = static_cast<double>(params.smax_cardinality) * params.smax_cardinality;
  return (factor * 20.0 * s2 * card2 / (3.0 - 2.0 * std::sqrt(2.0)) + 10.0 * s2) / params.eps_min;
}

double d_threshold(double L, const SystemParams& params) {
  if (!params.gap_min)
    throw ValidationError("D threshold needs mu_sigma(M+1), which does not exist when M = N");
  if (!(*params.gap_min > 0.0))
    throw ValidationError("different arms must have different mu values; the M best arms are not separated");
  return 4.0 * L / (*params.gap_min * *params.gap_min);
}

double exploration_time_bound(double t, double D) {
  if (t < 1.0) throw ArgumentError("t must be >= 1");
  return (4.0 * (3.0 * D * std::log(t) + 1.0) - 1.0) / 3.0;
}

std::int64_t exploitation_count_bound(Slot t, int num_arms) {
  if (t <= num_arms) throw ArgumentError("exploitation count bound requires t > N");
  const double x = 1.5 * static_cast<double>(t - num_arms) + 1.0;
  // ceil(log4 x) by integer search, immune to rounding at exact powers of 4.
  std::int64_t k = 0;
  double power = 1.0;
  while (power < x) {
    power *= 4.0;
    ++k;
  }
  return k;
}

double mistake_factor(const SystemParams& params, double L) {
  return 1.0 + params.eps_max * std::sqrt(L) / (10.0 * params.s_min);
}

double inversion_prob_bound(ArmId i, ArmId j, double t_n, const SystemParams& params, double L) {
  if (t_n < 1.0) throw ArgumentError("t_n must be >= 1");
  const auto n = params.num_arms();
  if (i < 1 || i > n || j < 1 || j > n) throw ArgumentError("arm id out of range");
  const double sizes = params.state_counts[static_cast<std::size_t>(i - 1)] +
                       params.state_counts[static_cast<std::size_t>(j - 1)];
  return std::min(1.0, sizes / params.pi_min * mistake_factor(params, L) / t_n);
}

double exploration_regret_term(double t, const SystemParams& params, double D) {
  const double m = params.num_players;
  const double n = params.num_arms();
  const double all = std::accumulate(params.mu_sorted.begin(), params.mu_sorted.end(), 0.0);
  return exploration_time_bound(t, D) * (params.top_mean_sum() - m / n * all);
}

namespace {

// Common factor 3 ceil(log4(1.5 (t - N) + 1)) (1 + eps_max sqrt(L) / (10 s_min)).
double epoch_mistake_factor(Slot t, const SystemParams& params, double L) {
  return 3.0 * static_cast<double>(exploitation_count_bound(t, params.num_arms())) * mistake_factor(params, L);
}

}  // namespace

double regret_bound_shared(Slot t, const SystemParams& params, double L, double D) {
  const int n = params.num_arms();
  const int m = params.num_players;
  const double c = epoch_mistake_factor(t, params, L);
  const auto mu = [&](int i) { return params.mu_sorted[static_cast<std::size_t>(i - 1)]; };
  const auto card = [&](int i) {
    return static_cast<double>(params.state_counts[static_cast<std::size_t>(params.sigma[static_cast<std::size_t>(i - 1)] - 1)]);
  };

  // Players 1..M-1 missing their target arm.
  double upper = 0.0;
  for (int i = 1; i <= m - 1; ++i)
    for (int j = 1; j <= n; ++j)
      if (j != i) upper += mu(i) * (card(i) + card(j)) / params.pi_min;
  // Player M displaced by an arm outside the best M (unbound i read as M).
  double displaced = 0.0;
  for (int j = m + 1; j <= n; ++j) displaced += (mu(m) - mu(j)) * (card(m) + card(j)) / params.pi_min;
  // Player M confused with one of the better arms.
  double confused = 0.0;
  for (int j = 1; j <= m - 1; ++j) confused += mu(m) * (card(m) + card(j)) / params.pi_min;

  double lemma = std::accumulate(params.lemma1_terms.begin(), params.lemma1_terms.end(), 0.0);
  return exploration_regret_term(static_cast<double>(t), params, D) + c * (upper + displaced + confused) + lemma;
}

double regret_bound_zero(Slot t, const SystemParams& params, double L, double D) {
  const int n = params.num_arms();
  const int m = params.num_players;
  const double c = epoch_mistake_factor(t, params, L);
  const auto card = [&](int i) {
    return static_cast<double>(params.state_counts[static_cast<std::size_t>(params.sigma[static_cast<std::size_t>(i - 1)] - 1)]);
  };

  double pairs = 0.0;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= n; ++j)
      if (j != i) pairs += (card(i) + card(i)) / params.pi_min;

  double lemma = std::accumulate(params.lemma1_terms.begin(), params.lemma1_terms.end(), 0.0);
  return c * params.top_mean_sum() * pairs + exploration_regret_term(static_cast<double>(t), params, D) + lemma;
}

double regret_bound(CollisionModel model, Slot t, const SystemParams& params, double L, double D) {
  return model == CollisionModel::Share ? regret_bound_shared(t, params, L, D) : regret_bound_zero(t, params, L, D);
}

void attach_bounds(RegretSeries& series, const std::vector<EpochRecord>& epoch_log, const SystemParams& params,
                   CollisionModel model, const std::function<PolicyParams(Slot)>& params_at) {
  series.epoch_end.assign(series.times.size(), false);
  series.bound.assign(series.times.size(), std::nullopt);
  std::size_t e = 0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const Slot t = series.times[i];
    while (e < epoch_log.size() && epoch_log[e].end() < t) ++e;
    if (e == epoch_log.size() || epoch_log[e].end() != t) continue;
    series.epoch_end[i] = true;
    if (t > params.num_arms()) {
      const auto p = params_at(t);
      series.bound[i] = regret_bound(model, t, params, p.L, p.D);
    }
  }
}

}  // namespace rmab
