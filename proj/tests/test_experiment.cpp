#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

#include "rmab/errors.hpp"
#include "rmab/experiment.hpp"

using namespace rmab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rmab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("run_experiment writes one trace per seed and one aggregate") {
  auto config = load_config(RMAB_CONFIG_DIR "/reference.json");
  config.horizon = 1000;
  config.seeds = {1, 2};
  const auto dir = scratch("files");
  const auto summary = run_experiment(config, dir);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"regret_seed1.csv", "regret_seed2.csv", "summary.json", "trace_seed1.csv",
                                          "trace_seed2.csv"});

  CHECK(summary["n_seeds"] == 2);
  CHECK(summary["label"] == "regret");
  CHECK(summary["config_digest"] == config_digest(config));
  CHECK_FALSE(summary["bounds_binding"].get<bool>());
  CHECK(summary["per_seed"].size() == 2);
  CHECK(summary["epoch_log"].size() >= 2);

  const auto trace = slurp(dir / "trace_seed1.csv");
  CHECK(trace.rfind("t,player,arm,state,collision,player_reward\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + 2 * 1000);
  const auto regret = slurp(dir / "regret_seed2.csv");
  CHECK(regret.rfind("t,regret,regret_over_ln_t,epoch_end,bound\n", 0) == 0);

  // Powers of two and every epoch end appear in the series.
  std::set<Slot> times;
  for (const auto& row : summary["series"]) times.insert(row["t"].get<Slot>());
  for (Slot t = 1; t <= 1000; t *= 2) CHECK(times.count(t) == 1);
  for (const auto& e : summary["epoch_log"]) {
    const Slot end = e["start"].get<Slot>() + e["length"].get<Slot>() - 1;
    if (end <= 1000) CHECK(times.count(end) == 1);
  }
}

TEST_CASE("same config twice gives byte-identical outputs") {
  auto config = load_config(RMAB_CONFIG_DIR "/reference.json");
  config.policy.mode = Coordination::NoPreAgreement;
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  run_experiment(config, a);
  run_experiment(config, b);
  for (const auto& entry : fs::directory_iterator(a)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
}

TEST_CASE("unwritable output directory is an I/O error") {
  const auto dir = scratch("blocker");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  auto config = load_config(RMAB_CONFIG_DIR "/reference.json");
  CHECK_THROWS_WITH(run_experiment(config, dir / "file" / "sub"), doctest::Contains("I/O error"));
}

TEST_CASE("collision counts split by epoch type") {
  auto config = load_config(RMAB_CONFIG_DIR "/reference.json");
  config.horizon = 20000;
  const auto pre = run_seed(config, 5);
  CHECK(pre.collisions_exploration == 0);
  config.policy.mode = Coordination::NoPreAgreement;
  const auto nopre = run_seed(config, 5);
  CHECK(nopre.collisions_exploration == 0);
  CHECK(nopre.collisions_exploitation >= 0);
  double total = 0.0;
  for (double r : nopre.player_reward) total += r;
  CHECK(total == doctest::Approx(nopre.total_reward).epsilon(1e-12));
}

TEST_CASE("bounds report") {
  auto config = load_config(RMAB_CONFIG_DIR "/valid_params.json");
  config.seeds = {1, 2, 3};
  const auto report = bounds_report(config, 1023);
  CHECK(report["t"] == 1023);
  CHECK(report["n_seeds"] == 3);
  CHECK(report["epoch_end"] == true);
  CHECK(report["bounds_binding"] == true);
  CHECK(report["measured_regret_mean"].get<double>() <= report["bound_zero"].get<double>());
  CHECK_THROWS_AS(bounds_report(config, 3), ArgumentError);
}

TEST_CASE("adaptive runs report growing parameters") {
  auto config = load_config(RMAB_CONFIG_DIR "/adaptive.json");
  const auto schedule = params_schedule(config.policy);
  CHECK(schedule(100).D < schedule(100000).D);
  CHECK(schedule(100).L < schedule(100000).L);
  config.horizon = 5000;
  config.seeds = {1};
  const auto r = run_seed(config, 1);
  CHECK(r.report_times.back() == 5000);
}
