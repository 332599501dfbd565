#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "daze/harness.hpp"
#include "daze/q_learning.hpp"
#include "daze/rng.hpp"

namespace daze {

/// Linear Gaussian policy with a tanh-squashed sample: u ~ N(W x + b,
/// diag(exp(2 log_std))), action = tanh(u). Features x include the tag channel.
struct GaussianPolicy {
  std::size_t obs_dim = 0;
  std::size_t act_dim = 0;
  std::vector<double> weights;  ///< act_dim x obs_dim, row-major
  std::vector<double> bias;
  std::vector<double> log_std;

  static GaussianPolicy zeros(std::size_t obs_dim, std::size_t act_dim, double log_std = -0.5);

  std::size_t n_params() const noexcept { return weights.size() + bias.size() + log_std.size(); }
  /// Flat view ordered weights, bias, log_std.
  std::vector<double> params() const;
  void set_params(std::span<const double> flat);

  std::vector<double> pre_mean(std::span<const double> features) const;
  /// tanh of the pre-squash mean; the deterministic action.
  std::vector<double> mean_action(std::span<const double> features) const;
  double log_prob(std::span<const double> features, std::span<const double> pre) const;

  struct Sample {
    std::vector<double> pre;
    std::vector<double> action;
  };
  Sample sample(std::span<const double> features, Rng& rng) const;

  friend bool operator==(const GaussianPolicy&, const GaussianPolicy&) = default;
};

/// Base features followed by the tag channel expanded to two indicators
/// (triggered, dazed), so the two perturbations get independent weights.
std::vector<double> policy_features(const Observation<std::vector<double>>& observation);
inline constexpr std::size_t kTagFeatures = 2;
std::vector<double> squash(std::span<const double> pre);
/// Inverse of squash with actions clamped to +-(1 - 1e-3) so boundary
/// actions (forced targets) have finite pre-images.
std::vector<double> unsquash(std::span<const double> action);

/// Frozen on-policy data: per step features, pre-squash sample and advantage.
struct SampleBatch {
  std::vector<std::vector<double>> features;
  std::vector<std::vector<double>> pre;
  std::vector<double> advantages;
};

/// (1/N) sum_t [A_t log pi(u_t | x_t) - preactivation_coef * |z_t|^2]
///   + entropy_coef * sum_i log_std_i,
/// where z_t is the pre-squash mean. The pre-activation term keeps the mean
/// out of the flat region of tanh.
double reinforce_surrogate(const GaussianPolicy& policy, const SampleBatch& batch, double entropy_coef = 0.0,
                           double preactivation_coef = 0.0);
/// Analytic gradient of reinforce_surrogate, in the flat parameter order.
std::vector<double> reinforce_gradient(const GaussianPolicy& policy, const SampleBatch& batch,
                                       double entropy_coef = 0.0, double preactivation_coef = 0.0);

enum class BaselineMode {
  episode_mean,  ///< A_t = G_0 - running mean of episode returns
  time_mean,     ///< A_t = G_t - running mean of returns-to-go at step t
  state_value,   ///< A_t = G_t - ridge fit of returns-to-go on value_features(x_t)
};

/// Baseline regressors: 1, x, x^2 (elementwise) over the policy features.
std::vector<double> value_features(std::span<const double> features);

struct ReinforceConfig {
  std::size_t iterations = 10000;
  std::size_t batch_episodes = 10;
  double learning_rate = 0.03;
  double gamma = 0.9;  ///< discount for returns-to-go
  BaselineMode baseline = BaselineMode::state_value;
  double baseline_rate = 0.1;  ///< running-mean step size (also the regression forgetting rate)
  double baseline_ridge = 1e-3;
  double entropy_coef = 0.0;
  double preactivation_coef = 0.2;
  bool normalize_advantages = true;
  double min_log_std = -1.5;
  double max_log_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ReinforceResult {
  GaussianPolicy policy;
  std::vector<EpisodeLog> episodes;
  std::size_t steps = 0;
};

/// Episodic REINFORCE with Adam. Throws TrainingError if a batch return or
/// parameter becomes non-finite.
ReinforceResult reinforce_train(ContinuousTrainingEnv& env, GaussianPolicy policy, const ReinforceConfig& config,
                                const StepSink<std::vector<double>, std::vector<double>>& sink = {});

}  // namespace daze
