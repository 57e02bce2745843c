#include <doctest.h>

#include <cmath>
#include <string>

#include "rmab/arm_model.hpp"
#include "rmab/errors.hpp"
#include "support.hpp"

using namespace rmab;
using rmab::test::matrix;

namespace {

// Random reversible kernel: normalise a symmetric positive weight matrix by
// rows; it is reversible with respect to pi proportional to the row sums.
Eigen::MatrixXd random_reversible(Rng& rng, Eigen::Index n) {
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) w(a, b) = w(b, a) = 0.05 + rng.uniform();
  Eigen::MatrixXd p = w;
  for (Eigen::Index a = 0; a < n; ++a) p.row(a) /= w.row(a).sum();
  return p;
}

// Independent route to |lambda_2|: general (non-symmetric) eigen solver.
double slem_general(const Eigen::MatrixXd& p) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(p, false);
  std::vector<double> mods;
  for (Eigen::Index i = 0; i < p.rows(); ++i) mods.push_back(std::abs(solver.eigenvalues()(i)));
  std::sort(mods.rbegin(), mods.rend());
  return mods.size() > 1 ? mods[1] : 0.0;
}

}  // namespace

TEST_CASE("stationary distribution examples") {
  auto pi = stationary_distribution(matrix({{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(pi(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pi(1) == doctest::Approx(0.5).epsilon(1e-14));

  pi = stationary_distribution(matrix({{0.9, 0.1}, {0.2, 0.8}}));
  CHECK(pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(pi(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  pi = stationary_distribution(matrix({{1.0}}));
  REQUIRE(pi.size() == 1);
  CHECK(pi(0) == 1.0);
}

TEST_CASE("kernel validation errors") {
  CHECK_THROWS_AS(stationary_distribution(matrix({{0.5, 0.6}, {0.5, 0.5}})), ValidationError);
  CHECK_THROWS_AS(stationary_distribution(matrix({{1.1, -0.1}, {0.5, 0.5}})), ValidationError);
  CHECK_THROWS_AS(stationary_distribution(matrix({{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}})), ValidationError);

  try {
    stationary_distribution(matrix({{1.0, 0.0}, {0.0, 1.0}}));
    FAIL("reducible chain accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("{1}") != std::string::npos);
  }
  try {
    stationary_distribution(matrix({{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}}));
    FAIL("reducible chain accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("{1, 2}") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(stationary_distribution(matrix({{0.0, 1.0}, {1.0, 0.0}})), doctest::Contains("periodic"),
                       ValidationError);
}

TEST_CASE("spectral gap examples") {
  CHECK(spectral_gap(matrix({{0.5, 0.5}, {0.5, 0.5}})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_gap(matrix({{0.9, 0.1}, {0.2, 0.8}})) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(spectral_gap(matrix({{0.95, 0.05}, {0.05, 0.95}})) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(spectral_gap(matrix({{1.0}})) == 1.0);
}

TEST_CASE("non-reversible kernel is rejected") {
  const auto p = matrix({{0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}, {0.8, 0.1, 0.1}});
  CHECK_NOTHROW(stationary_distribution(p));
  CHECK_THROWS_AS(spectral_gap(p), ReversibilityError);
  CHECK_THROWS_AS(ArmModel({1.0, 2.0, 3.0}, p), ReversibilityError);
}

TEST_CASE("stationary mean examples") {
  CHECK(stationary_mean(ArmModel({1.0, 2.0}, matrix({{0.5, 0.5}, {0.5, 0.5}}))) == doctest::Approx(1.5));
  CHECK(stationary_mean(ArmModel({1.0, 2.0}, matrix({{0.9, 0.1}, {0.2, 0.8}}))) == doctest::Approx(4.0 / 3.0));
  CHECK(stationary_mean(ArmModel({0.3}, matrix({{1.0}}))) == doctest::Approx(0.3));
}

TEST_CASE("arm construction rejects non-positive rewards and bad shapes") {
  CHECK_THROWS_AS(ArmModel({0.0, 1.0}, matrix({{0.5, 0.5}, {0.5, 0.5}})), ValidationError);
  CHECK_THROWS_AS(ArmModel({-1.0, 1.0}, matrix({{0.5, 0.5}, {0.5, 0.5}})), ValidationError);
  CHECK_THROWS_AS(ArmModel({1.0}, matrix({{0.5, 0.5}, {0.5, 0.5}})), ValidationError);
  CHECK_THROWS_AS(ArmModel({1.0, 2.0}, matrix({{1.0, 0.0}, {0.0, 1.0}})), ValidationError);
  CHECK_THROWS_AS(ArmModel({1.0, 2.0}, matrix({{0.5, 0.5}, {0.5, 0.5}}), PassiveMode::Frozen, 2), ValidationError);
}

TEST_CASE("passive dynamics") {
  Rng rng(7);
  SUBCASE("frozen arm never moves") {
    ArmModel arm({1.0, 2.0, 3.0}, matrix({{0.2, 0.4, 0.4}, {0.4, 0.2, 0.4}, {0.4, 0.4, 0.2}}), PassiveMode::Frozen, 1);
    for (int i = 0; i < 1000; ++i) CHECK(evolve(arm, false, rng) == 1);
  }
  SUBCASE("deterministic cycle steps by one") {
    ArmModel arm({1.0, 2.0}, matrix({{0.5, 0.5}, {0.5, 0.5}}), PassiveMode::DeterministicCycle, 0);
    CHECK(evolve(arm, false, rng) == 1);
    CHECK(evolve(arm, false, rng) == 0);
  }
  SUBCASE("resampling modes stay in range and visit every state") {
    for (auto mode : {PassiveMode::SameKernel, PassiveMode::IndependentResample}) {
      ArmModel arm({1.0, 2.0, 3.0}, matrix({{0.2, 0.4, 0.4}, {0.4, 0.2, 0.4}, {0.4, 0.4, 0.2}}), mode, 0);
      std::vector<int> seen(3, 0);
      for (int i = 0; i < 200; ++i) ++seen.at(evolve(arm, false, rng));
      for (int s : seen) CHECK(s > 0);
    }
  }
  SUBCASE("mode names round-trip") {
    for (auto mode : {PassiveMode::Frozen, PassiveMode::SameKernel, PassiveMode::IndependentResample,
                      PassiveMode::DeterministicCycle})
      CHECK(passive_mode_from_string(to_string(mode)) == mode);
    CHECK_THROWS_AS(passive_mode_from_string("sleepy"), ArgumentError);
  }
}

TEST_CASE("empirical occupancy under active play converges to pi") {
  for (const auto& proto : rmab::test::reference_arms()) {
    ArmModel arm = proto;
    Rng rng(12345);
    arm.reset(rng);
    std::vector<double> freq(arm.size(), 0.0);
    const int plays = 100000;
    for (int i = 0; i < plays; ++i) {
      freq[arm.current_state_index()] += 1.0 / plays;
      arm.evolve(true, rng);
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < arm.size(); ++s) tv += 0.5 * std::abs(freq[s] - arm.summary().pi(static_cast<Eigen::Index>(s)));
    CHECK(tv <= 0.02);
  }
}

TEST_CASE("random reversible kernels: stationarity, detailed balance, and gap agree with a general eigensolver") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.index(6));
    const auto p = random_reversible(rng, n);
    const auto pi = stationary_distribution(p);
    CHECK(std::abs(pi.sum() - 1.0) <= 1e-12);
    CHECK(pi.minCoeff() >= 0.0);
    CHECK(((pi.transpose() * p) - pi.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) CHECK(std::abs(pi(a) * p(a, b) - pi(b) * p(b, a)) <= 1e-10);

    const double gap = spectral_gap(p);
    CHECK(gap > 0.0);
    CHECK(gap <= 1.0);
    CHECK(gap == doctest::Approx(1.0 - slem_general(p)).epsilon(1e-9));

    // Same inputs, bit-identical outputs.
    CHECK(spectral_gap(p) == gap);
    CHECK((stationary_distribution(p).array() == pi.array()).all());
  }
}

TEST_CASE("reset draws from pi unless an initial state is fixed") {
  ArmModel fixed({1.0, 2.0}, matrix({{0.9, 0.1}, {0.2, 0.8}}), PassiveMode::Frozen, 1);
  Rng rng(3);
  fixed.reset(rng);
  CHECK(fixed.current_state_index() == 1);

  ArmModel drawn({1.0, 2.0}, matrix({{0.9, 0.1}, {0.2, 0.8}}));
  int ones = 0;
  for (int i = 0; i < 30000; ++i) {
    drawn.reset(rng);
    ones += static_cast<int>(drawn.current_state_index());
  }
  CHECK(ones / 30000.0 == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}
