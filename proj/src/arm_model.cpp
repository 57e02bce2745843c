#include "rmab/arm_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include "rmab/errors.hpp"

namespace rmab {

namespace {

std::string format_states(const std::vector<Eigen::Index>& states) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < states.size(); ++i) out << (i ? ", " : "") << states[i];
  out << '}';
  return out.str();
}

// BFS levels from state 0 over edges with positive probability; -1 = unreached.
std::vector<Eigen::Index> bfs_levels(const Eigen::MatrixXd& p, bool transpose) {
  const Eigen::Index n = p.rows();
  std::vector<Eigen::Index> level(static_cast<std::size_t>(n), -1);
  std::queue<Eigen::Index> frontier;
  level[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = transpose ? p(v, u) : p(u, v);
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

std::vector<Eigen::Index> unreached(const std::vector<Eigen::Index>& level) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < level.size(); ++i)
    if (level[i] < 0) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace

std::string_view to_string(PassiveMode mode) {
  switch (mode) {
    case PassiveMode::Frozen: return "frozen";
    case PassiveMode::SameKernel: return "same_kernel";
    case PassiveMode::IndependentResample: return "independent_resample";
    case PassiveMode::DeterministicCycle: return "deterministic_cycle";
  }
  return "frozen";
}

PassiveMode passive_mode_from_string(std::string_view name) {
  for (auto mode : {PassiveMode::Frozen, PassiveMode::SameKernel, PassiveMode::IndependentResample,
                    PassiveMode::DeterministicCycle}) {
    if (to_string(mode) == name) return mode;
  }
  throw ArgumentError("unknown passive mode '" + std::string(name) + "'");
}

void validate_ergodic_kernel(const Eigen::MatrixXd& kernel) {
  const Eigen::Index n = kernel.rows();
  if (n == 0 || kernel.cols() != n) throw ValidationError("transition matrix must be square and non-empty");
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!std::isfinite(kernel(r, c)) || kernel(r, c) < 0.0)
        throw ValidationError("transition matrix has a negative or non-finite entry at (" + std::to_string(r) +
                              ", " + std::to_string(c) + ")");
    }
    if (std::abs(kernel.row(r).sum() - 1.0) > kStochasticTol)
      throw ValidationError("row " + std::to_string(r) + " of the transition matrix does not sum to 1");
  }

  const auto forward = bfs_levels(kernel, false);
  if (auto missing = unreached(forward); !missing.empty())
    throw ValidationError("reducible chain: states " + format_states(missing) + " are unreachable from state 0");
  if (auto missing = unreached(bfs_levels(kernel, true)); !missing.empty())
    throw ValidationError("reducible chain: state 0 is unreachable from states " + format_states(missing));

  // Period = gcd over edges (u, v) of level(u) + 1 - level(v).
  Eigen::Index period = 0;
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v)
      if (kernel(u, v) > 0.0) period = std::gcd(period, std::abs(forward[u] + 1 - forward[v]));
  if (period != 1) throw ValidationError("periodic chain (period " + std::to_string(period) + ")");
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& kernel) {
  validate_ergodic_kernel(kernel);
  const Eigen::Index n = kernel.rows();
  // Solve pi (P - I) = 0 with the last balance equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = kernel.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

double second_eigenvalue_modulus(const Eigen::MatrixXd& kernel) {
  const Eigen::VectorXd pi = stationary_distribution(kernel);
  const Eigen::Index n = kernel.rows();
  if (n == 1) return 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b)
      if (std::abs(pi(a) * kernel(a, b) - pi(b) * kernel(b, a)) > kReversibilityTol)
        throw ReversibilityError("transition matrix is not reversible: detailed balance fails for states " +
                                 std::to_string(a) + " and " + std::to_string(b));

  const Eigen::VectorXd root = pi.cwiseSqrt();
  Eigen::MatrixXd sym = root.asDiagonal() * kernel * root.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending; values(n-1) == 1
  return std::max(std::abs(values(0)), std::abs(values(n - 2)));
}

double spectral_gap(const Eigen::MatrixXd& kernel) { return 1.0 - second_eigenvalue_modulus(kernel); }

ArmModel::ArmModel(std::vector<double> states, Eigen::MatrixXd active_kernel, PassiveMode passive_mode,
                   std::optional<std::size_t> initial_state)
    : states_(std::move(states)),
      kernel_(std::move(active_kernel)),
      passive_mode_(passive_mode),
      initial_state_(initial_state) {
  if (states_.empty()) throw ValidationError("arm needs at least one state");
  if (static_cast<Eigen::Index>(states_.size()) != kernel_.rows())
    throw ValidationError("transition matrix size does not match the number of states");
  for (double s : states_)
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("state (reward) values must be positive");
  if (initial_state_ && *initial_state_ >= states_.size())
    throw ValidationError("initial state index out of range");

  summary_.pi = stationary_distribution(kernel_);
  summary_.lambda2 = second_eigenvalue_modulus(kernel_);
  summary_.epsilon = 1.0 - summary_.lambda2;
  summary_.mu = 0.0;
  for (std::size_t i = 0; i < states_.size(); ++i) summary_.mu += states_[i] * summary_.pi(static_cast<Eigen::Index>(i));

  const auto n = kernel_.rows();
  row_buffer_.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) row_buffer_[static_cast<std::size_t>(r * n + c)] = kernel_(r, c);
  current_ = initial_state_.value_or(0);
}

void ArmModel::set_state_index(std::size_t index) {
  if (index >= states_.size()) throw ArgumentError("state index out of range");
  current_ = index;
}

void ArmModel::reset(Rng& rng) {
  if (initial_state_) {
    current_ = *initial_state_;
  } else {
    current_ = rng.categorical(std::span<const double>(summary_.pi.data(), states_.size()));
  }
}

std::size_t ArmModel::sample_row(Eigen::Index row, Rng& rng) const {
  const std::size_t n = states_.size();
  return rng.categorical(std::span<const double>(row_buffer_.data() + static_cast<std::size_t>(row) * n, n));
}

std::size_t ArmModel::evolve(bool played, Rng& rng) {
  if (played) {
    current_ = sample_row(static_cast<Eigen::Index>(current_), rng);
    return current_;
  }
  switch (passive_mode_) {
    case PassiveMode::Frozen: break;
    case PassiveMode::SameKernel: current_ = sample_row(static_cast<Eigen::Index>(current_), rng); break;
    case PassiveMode::IndependentResample:
      current_ = rng.categorical(std::span<const double>(summary_.pi.data(), states_.size()));
      break;
    case PassiveMode::DeterministicCycle: current_ = (current_ + 1) % states_.size(); break;
  }
  return current_;
}

double stationary_mean(const ArmModel& arm) { return arm.summary().mu; }

}  // namespace rmab
