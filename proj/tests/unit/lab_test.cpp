#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "daze/error.hpp"
#include "daze/lab.hpp"

using namespace daze;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

RunConfig small_grid() { return load_config(std::filesystem::path(DAZELAB_TEST_DATA) / "small_gridworld.json"); }

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(out, {r.control->metrics, r.run.metrics});
  return out.str();
}

}  // namespace

TEST(Config, RejectsUnknownAndMistypedKeys) {
  EXPECT_EQ(config_error_key(R"({"env.name": "gridworld", "attack.bogus": 1})"), "attack.bogus");
  EXPECT_EQ(config_error_key(R"({"env.name": "gridworld", "attack.beta": "high"})"), "attack.beta");
  EXPECT_EQ(config_error_key(R"({"env.name": "gridworld", "attack.beta": 1.5})"), "attack.beta");
  EXPECT_EQ(config_error_key(R"({"env.name": "lunar"})"), "env.name");
  EXPECT_EQ(config_error_key(R"({"env.name": "gridworld", "attack.kind": "evil"})"), "attack.kind");
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
}

TEST(Config, RejectsKeysOfTheOtherEnvironment) {
  EXPECT_EQ(config_error_key(R"({"env.name": "gridworld", "env.damping": 0.5})"), "env.damping");
  EXPECT_EQ(config_error_key(R"({"env.name": "point_mass", "train.total_steps": 10})"), "train.total_steps");
  EXPECT_EQ(config_error_key(R"({"env.name": "point_mass", "env.slip": 0.1})"), "env.slip");
}

TEST(Config, DefaultsPerEnvironment) {
  const auto grid = parse_config(R"({"env.name": "gridworld"})");
  EXPECT_EQ(grid.env, EnvKind::gridworld);
  EXPECT_EQ(grid.daze.beta, 0.003);
  EXPECT_EQ(grid.daze.k, 8);
  EXPECT_EQ(grid.daze.target_index, grid_action::stay);
  const auto mass = parse_config(R"({"env.name": "point_mass"})");
  EXPECT_EQ(mass.daze.beta, 0.01);
  EXPECT_EQ(mass.daze.target_vector, (std::vector<double>{-1.0, -1.0}));
  EXPECT_EQ(mass.run_id(), "point_mass_daze_b0.01_k8");
  EXPECT_EQ(grid.with_attack(AttackKind::none).run_id(), "gridworld_none");
  EXPECT_EQ(grid.with_attack(AttackKind::static_reward).run_id(), "gridworld_static_b0.003");
}

TEST(Config, BaselineFollowsAttackSettings) {
  const auto c = parse_config(R"({"env.name": "gridworld", "attack.kind": "static", "attack.beta": 0.02})");
  EXPECT_EQ(c.attack, AttackKind::static_reward);
  EXPECT_EQ(c.baseline.beta, 0.02);
  EXPECT_EQ(c.baseline.target_index, grid_action::stay);
  EXPECT_EQ(c.with_cell(0.005, 4).baseline.beta, 0.005);
}

TEST(Config, ParseSeedsListsAndRanges) {
  EXPECT_EQ(parse_seeds("3"), (std::vector<std::uint64_t>{3}));
  EXPECT_EQ(parse_seeds("0-3,7"), (std::vector<std::uint64_t>{0, 1, 2, 3, 7}));
  EXPECT_THROW(parse_seeds(""), ConfigError);
  EXPECT_THROW(parse_seeds("4-2"), ConfigError);
  EXPECT_THROW(parse_seeds("a"), ConfigError);
}

TEST(Config, HashIgnoresOutputOnlyKeys) {
  const auto a = parse_config(R"({"env.name": "gridworld"})");
  const auto b = parse_config(R"({"env.name": "gridworld", "run.log_steps": false, "sweep.ks": [2]})");
  const auto c = parse_config(R"({"env.name": "gridworld", "attack.k": 4})");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(a.hash(), parse_config(a.canonical()).hash());
}

TEST(Csv, FormatsNumbersShortestRoundTrip) {
  EXPECT_EQ(format_number(0.003), "0.003");
  EXPECT_EQ(format_number(8.0), "8");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Csv, EmptyFieldsForControlAndBaselines) {
  RunMetrics none;
  none.attack = AttackKind::none;
  none.seed_count = 2;
  none.br = 0.5;
  none.config_hash = "abc";
  EXPECT_EQ(csv_row(none), "gridworld,none,,,,2,,,0.5,0,,abc");
  RunMetrics stat = none;
  stat.attack = AttackKind::static_reward;
  stat.beta = 0.01;
  stat.tau_eval = 0.2;
  stat.asr = 0.25;
  stat.asr_std = 0.0;
  EXPECT_EQ(csv_row(stat), "gridworld,static,0.01,,0.2,2,0.25,0,0.5,0,,abc");
}

TEST(Experiment, MatchesGoldenCsv) {
  const auto result = run_experiment(small_grid());
  EXPECT_EQ(csv_of(result), read_file(std::filesystem::path(DAZELAB_TEST_DATA) / "small_gridworld.csv"));
  EXPECT_EQ(result.run.metrics.seed_count, 2u);
  EXPECT_EQ(result.control->metrics.attack, AttackKind::none);
}

TEST(Experiment, JobCountDoesNotChangeOutputBytes) {
  const auto config = small_grid();
  const auto dir = std::filesystem::temp_directory_path() / "dazelab_lab_jobs";
  std::filesystem::remove_all(dir);
  RunOptions one{1, dir / "one"}, two{2, dir / "two"};
  run_experiment(config, one);
  run_experiment(config, two);
  for (const char* name : {"results.csv", "gridworld_daze_b0.003_k8.json", "policies/gridworld_none_seed1.json"}) {
    EXPECT_EQ(read_file(dir / "one" / name), read_file(dir / "two" / name)) << name;
    EXPECT_FALSE(read_file(dir / "one" / name).empty()) << name;
  }
  std::filesystem::remove_all(dir);
}

TEST(Ablation, SingleCellMatchesExperiment) {
  auto config = small_grid();
  config.sweep.betas = {config.daze.beta};
  config.sweep.ks = {config.daze.k};
  const auto ablation = run_ablation(config);
  const auto experiment = run_experiment(config);
  ASSERT_EQ(ablation.cells.size(), 1u);
  EXPECT_EQ(csv_row(ablation.cells[0].metrics), csv_row(experiment.run.metrics));
  EXPECT_EQ(csv_row(ablation.control->metrics), csv_row(experiment.control->metrics));
  ASSERT_EQ(ablation.trends.size(), 1u);
  EXPECT_EQ(ablation.trends[0].spearman, 0.0);  // a single k has no trend
}

TEST(Evaluation, SavedPoliciesReproduceMetrics) {
  auto config = small_grid();
  const auto dir = std::filesystem::temp_directory_path() / "dazelab_lab_eval";
  std::filesystem::remove_all(dir);
  const auto trained = run_experiment(config, {1, dir});
  const auto evaluated = run_evaluation(config, {1, dir});
  EXPECT_EQ(evaluated.metrics.asr, trained.run.metrics.asr);
  EXPECT_EQ(evaluated.metrics.br, trained.run.metrics.br);
  std::filesystem::remove_all(dir);
}

TEST(PolicyJson, RoundTrips) {
  const TabularPolicy t(2, 3, {0.2, 0.3, 0.5, 1.0, 0.0, 0.0});
  EXPECT_EQ(tabular_policy_from_json(to_json(t)), t);
  auto g = GaussianPolicy::zeros(6, 2, -0.7);
  g.weights[3] = 0.1 + 0.2;
  g.bias[1] = -1.0 / 3.0;
  EXPECT_EQ(gaussian_policy_from_json(to_json(g)), g);
  EXPECT_THROW(tabular_policy_from_json(to_json(g)), ArgumentError);
}

TEST(Verification, ZeroBetaSingleInstancePasses) {
  auto config = parse_config(R"({"env.name": "gridworld", "verify.instances": 1, "verify.extra_instances": 0,
                                 "verify.betas": [0.0], "verify.p_phis": [0.5]})");
  const auto summary = run_verification(config);
  EXPECT_TRUE(summary.passed);
  EXPECT_EQ(summary.failures, 0u);
  EXPECT_EQ(summary.rows.size(), 3u);
  ASSERT_TRUE(summary.negative_control.has_value());
  EXPECT_FALSE(summary.negative_control->witnesses.empty());
}

TEST(Paths, DefaultOutDirHonoursEnvironment) {
  ::setenv("DAZELAB_OUT", "/tmp/somewhere", 1);
  EXPECT_EQ(default_out_dir(), std::filesystem::path("/tmp/somewhere"));
  ::unsetenv("DAZELAB_OUT");
  EXPECT_EQ(default_out_dir(), std::filesystem::path("dazelab_out"));
}
