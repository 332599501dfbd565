#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "daze/baselines.hpp"
#include "daze/gridworld.hpp"
#include "daze/metrics.hpp"
#include "daze/point_mass.hpp"
#include "daze/q_learning.hpp"
#include "daze/reinforce.hpp"
#include "daze/theory.hpp"
#include "daze/wrapper.hpp"

namespace daze {

enum class EnvKind { gridworld, point_mass };
enum class AttackKind { none, daze, static_reward, dynamic_reward };

const char* to_string(EnvKind kind);
const char* to_string(AttackKind kind);

struct EvalConfig {
  std::size_t asr_trajectories = 100;
  std::size_t br_episodes = 100;
  std::size_t asr_samples = 1;  ///< sampled actions per continuous evaluation state
  EvalStateMode state_mode = EvalStateMode::visitation;
};

struct SweepConfig {
  std::vector<double> betas{0.0025, 0.005, 0.01, 0.02};
  std::vector<int> ks{1, 4, 8, 16};
};

struct VerifyConfig {
  std::size_t instances = 100;
  std::size_t n_states = 3;
  std::size_t n_actions = 2;
  std::size_t extra_instances = 20;
  std::size_t extra_n_states = 4;
  std::vector<double> betas{0.1, 0.3};
  std::vector<double> p_phis{0.25, 0.75};
  std::uint64_t seed = 0;
  double tol = kDefaultVerifyTol;
  double enumeration_budget = kDefaultEnumerationBudget;
  bool require_assumption1 = true;
  bool negative_control = true;
};

/// Everything one experiment needs. Built by parse_config from a flat JSON
/// object with namespaced keys (env.*, attack.*, train.*, eval.*, sweep.*,
/// verify.*, run.*).
struct RunConfig {
  EnvKind env = EnvKind::gridworld;
  AttackKind attack = AttackKind::daze;
  GridworldSpec grid;
  PointMassSpec point_mass;
  AttackConfig daze = AttackConfig::discrete(grid_action::stay);
  BaselineConfig baseline;  ///< beta and target mirror `daze`
  QLearnConfig q;
  ReinforceConfig reinforce;
  double initial_log_std = -0.5;
  EvalConfig eval;
  SweepConfig sweep;
  VerifyConfig verify;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool log_steps = true;
  std::size_t log_max_records = 10000;
  std::optional<std::filesystem::path> policy_dir;

  /// Defaults for an environment: paper beta (0.3% discrete, 1% continuous),
  /// k = 8, target stay / (-1, -1), tuned learner settings.
  static RunConfig defaults(EnvKind env);

  /// Same config with a different attack, beta and k (baseline fields follow).
  RunConfig with_attack(AttackKind kind) const;
  RunConfig with_cell(double beta, int k) const;

  /// Effective settings as sorted JSON; the basis of config_hash.
  std::string canonical() const;
  /// 16 hex digits of FNV-1a over canonical().
  std::string hash() const;
  /// File stem for this run's artifacts, e.g. "gridworld_daze_b0.003_k8".
  std::string run_id() const;
};

/// Parses a flat JSON object. Unknown keys, type mismatches and keys that do
/// not apply to the chosen environment raise ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Seed lists: comma-separated integers or inclusive ranges "a-b".
std::vector<std::uint64_t> parse_seeds(const std::string& text);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::optional<double> asr;  ///< empty for attack = none
  double br = 0.0;
  double br_std = 0.0;
  std::optional<double> daze_rate;  ///< daze runs only
  std::size_t train_steps = 0;
  std::size_t eval_states = 0;
  std::size_t poisoned_steps = 0;
  // Daze bookkeeping (daze runs only).
  std::size_t dazed_records = 0;
  std::size_t derived_dazed_records = 0;
  std::size_t defiant_triggers = 0;
  std::size_t null_transitions = 0;
  std::size_t uniform_steps = 0;
  std::string policy_json;
};

struct RunMetrics {
  EnvKind env = EnvKind::gridworld;
  AttackKind attack = AttackKind::none;
  double beta = 0.0;
  int k = 0;
  double tau_eval = 0.0;
  std::size_t seed_count = 0;
  std::size_t failed_seeds = 0;
  std::optional<double> asr;
  std::optional<double> asr_std;
  double br = 0.0;
  double br_std = 0.0;
  std::optional<double> daze_rate;
  std::size_t n_eval_trajectories = 0;
  std::string config_hash;
};

struct CellResult {
  RunConfig config;
  RunMetrics metrics;
  std::vector<SeedOutcome> seeds;
};

struct RunOptions {
  unsigned jobs = 1;
  /// Where CSV, result documents, policies and step logs go. Unset writes nothing.
  std::optional<std::filesystem::path> out_dir;
};

/// Trains and evaluates one seed. Training errors are caught and reported
/// through `failed`.
SeedOutcome run_seed(const RunConfig& config, std::uint64_t seed, const RunOptions& options = {});

/// Aggregates seed outcomes; stds are population stds over successful seeds.
RunMetrics aggregate(const RunConfig& config, const std::vector<SeedOutcome>& seeds);

struct ExperimentResult {
  CellResult run;
  std::optional<CellResult> control;  ///< the attack = none twin
};

/// Runs every seed of the config plus an attack = none twin on the same
/// seeds. Cells run in parallel; results are reduced in (run, seed) order.
ExperimentResult run_experiment(const RunConfig& config, const RunOptions& options = {});

struct AblationTrend {
  double beta = 0.0;
  double spearman = 0.0;  ///< over (k, per-seed ASR) pairs
  std::vector<double> mean_asr;  ///< per k, grid order
};

struct AblationResult {
  std::vector<CellResult> cells;  ///< beta-major, k-minor, in grid order
  std::optional<CellResult> control;
  std::vector<AblationTrend> trends;
};

/// Full factorial beta x k sweep over config.sweep with one shared control.
AblationResult run_ablation(const RunConfig& config, const RunOptions& options = {});

/// Evaluates saved policies (from a previous train run) without training.
CellResult run_evaluation(const RunConfig& config, const RunOptions& options = {});

struct VerificationRow {
  std::string check;
  std::uint64_t seed = 0;
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double beta = 0.0;
  double p_phi = 0.0;
  std::string status;  ///< "pass", "fail" or "skipped"
  std::string reason;
  std::size_t witnesses = 0;
  double max_value_gap = 0.0;
  std::size_t policies = 0;
  std::size_t maximizers = 0;
};

struct VerificationSummary {
  std::vector<VerificationRow> rows;
  std::vector<TheoremReport> reports;  ///< same order as the non-skipped rows
  std::optional<TheoremReport> negative_control;
  std::size_t failures = 0;
  std::size_t skipped = 0;
  /// True iff no row failed and the negative control (when run) produced witnesses.
  bool passed = false;
};

VerificationSummary run_verification(const RunConfig& config, const RunOptions& options = {});

// Output formats.

inline constexpr const char* kCsvHeader =
    "env,attack,beta,k,tau_eval,seed_count,asr,asr_std,br,br_std,daze_rate,config_hash";

/// Shortest round-trip decimal form.
std::string format_number(double value);
std::string csv_row(const RunMetrics& metrics);
void write_csv(std::ostream& out, const std::vector<RunMetrics>& rows);
void write_verification_csv(std::ostream& out, const VerificationSummary& summary);
std::string result_json(const CellResult& cell, const std::optional<CellResult>& control);
std::string ablation_json(const AblationResult& result);
std::string verification_json(const VerificationSummary& summary);

// Policy documents.
std::string to_json(const TabularPolicy& policy);
std::string to_json(const GaussianPolicy& policy);
TabularPolicy tabular_policy_from_json(const std::string& text);
GaussianPolicy gaussian_policy_from_json(const std::string& text);

/// Output directory from DAZELAB_OUT, else "dazelab_out".
std::filesystem::path default_out_dir();

}  // namespace daze
