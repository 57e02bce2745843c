#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "rmab/rng.hpp"

namespace rmab {

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kReversibilityTol = 1e-10;

/// Dynamics of an arm while no player activates it.
enum class PassiveMode {
  Frozen,               // exogenous model: state does not move
  SameKernel,           // one step of the active kernel
  IndependentResample,  // fresh draw from the stationary distribution
  DeterministicCycle,   // state index advances by one, wrapping
};

std::string_view to_string(PassiveMode mode);
PassiveMode passive_mode_from_string(std::string_view name);

struct StationarySummary {
  Eigen::VectorXd pi;
  double mu = 0.0;
  double lambda2 = 0.0;  // second-largest eigenvalue modulus
  double epsilon = 1.0;  // 1 - lambda2
};

/// Checks that `kernel` is square, non-negative and row-stochastic, and that
/// the chain is irreducible and aperiodic. Throws ValidationError otherwise;
/// the reducible case names the states unreachable from state 0 (or the ones
/// that cannot return to it).
void validate_ergodic_kernel(const Eigen::MatrixXd& kernel);

/// Stationary distribution of an ergodic kernel, as a column vector.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& kernel);

/// 1 - |lambda_2| for a reversible ergodic kernel. The spectrum is obtained
/// from the symmetrized matrix diag(sqrt pi) P diag(1/sqrt pi), which is real
/// exactly when detailed balance holds; a violation throws ReversibilityError.
double spectral_gap(const Eigen::MatrixXd& kernel);

/// Second-largest eigenvalue modulus (0 for a one-state chain).
double second_eigenvalue_modulus(const Eigen::MatrixXd& kernel);

/// A restless Markovian arm: the state value is the reward.
class ArmModel {
 public:
  /// Validates the model and, if `initial_state` is empty, leaves the state
  /// unset until `reset` draws it from pi.
  ArmModel(std::vector<double> states, Eigen::MatrixXd active_kernel,
           PassiveMode passive_mode = PassiveMode::Frozen,
           std::optional<std::size_t> initial_state = std::nullopt);

  const std::vector<double>& states() const noexcept { return states_; }
  const Eigen::MatrixXd& active_kernel() const noexcept { return kernel_; }
  PassiveMode passive_mode() const noexcept { return passive_mode_; }
  const StationarySummary& summary() const noexcept { return summary_; }
  std::size_t size() const noexcept { return states_.size(); }
  std::optional<std::size_t> initial_state() const noexcept { return initial_state_; }

  std::size_t current_state_index() const noexcept { return current_; }
  double current_value() const { return states_[current_]; }
  void set_state_index(std::size_t index);

  /// Puts the arm in its initial state: the configured index, or a draw from pi.
  void reset(Rng& rng);

  /// Advances one slot and returns the new state index.
  std::size_t evolve(bool played, Rng& rng);

 private:
  std::size_t sample_row(Eigen::Index row, Rng& rng) const;

  std::vector<double> states_;
  Eigen::MatrixXd kernel_;
  PassiveMode passive_mode_;
  std::optional<std::size_t> initial_state_;
  StationarySummary summary_;
  std::vector<double> row_buffer_;  // row-major copy of the kernel for sampling
  std::size_t current_ = 0;
};

/// mu = sum_s s * pi_s.
double stationary_mean(const ArmModel& arm);

/// Free-function form of ArmModel::evolve.
inline std::size_t evolve(ArmModel& arm, bool played, Rng& rng) { return arm.evolve(played, rng); }

}  // namespace rmab
