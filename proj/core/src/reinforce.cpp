#include "daze/reinforce.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "daze/error.hpp"

namespace daze {
namespace {

constexpr double kSquashLimit = 1.0 - 1e-3;

struct Adam {
  std::vector<double> m, v;
  std::size_t t = 0;
  double lr;

  Adam(std::size_t n, double learning_rate) : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}

  void ascend(std::vector<double>& params, const std::vector<double>& grad) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      params[i] += lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

// Exponentially forgotten normal equations for a linear value baseline.
class ValueRegression {
 public:
  explicit ValueRegression(std::size_t dim) : xtx_(Eigen::MatrixXd::Zero(dim, dim)), xty_(Eigen::VectorXd::Zero(dim)), w_(Eigen::VectorXd::Zero(dim)) {}

  double predict(const std::vector<double>& phi) const {
    return Eigen::Map<const Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size())).dot(w_);
  }

  void fit(const std::vector<std::vector<double>>& phis, const std::vector<double>& targets, double rate, double ridge) {
    const auto dim = xtx_.rows();
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(dim);
    for (std::size_t t = 0; t < phis.size(); ++t) {
      const Eigen::Map<const Eigen::VectorXd> x(phis[t].data(), dim);
      xtx.selfadjointView<Eigen::Lower>().rankUpdate(x);
      xty += targets[t] * x;
    }
    const double n = static_cast<double>(phis.size());
    xtx = xtx.selfadjointView<Eigen::Lower>();
    const double keep = ready_ ? 1.0 - rate : 0.0;
    xtx_ = keep * xtx_ + (1.0 - keep) * xtx / n;
    xty_ = keep * xty_ + (1.0 - keep) * xty / n;
    ready_ = true;
    w_ = (xtx_ + ridge * Eigen::MatrixXd::Identity(dim, dim)).ldlt().solve(xty_);
  }

  bool ready() const noexcept { return ready_; }

 private:
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  Eigen::VectorXd w_;
  bool ready_ = false;
};

}  // namespace

std::vector<double> value_features(std::span<const double> features) {
  std::vector<double> phi;
  phi.reserve(1 + 2 * features.size());
  phi.push_back(1.0);
  for (double x : features) phi.push_back(x);
  for (double x : features) phi.push_back(x * x);
  return phi;
}

GaussianPolicy GaussianPolicy::zeros(std::size_t obs_dim, std::size_t act_dim, double log_std) {
  GaussianPolicy p;
  p.obs_dim = obs_dim;
  p.act_dim = act_dim;
  p.weights.assign(obs_dim * act_dim, 0.0);
  p.bias.assign(act_dim, 0.0);
  p.log_std.assign(act_dim, log_std);
  return p;
}

std::vector<double> GaussianPolicy::params() const {
  std::vector<double> flat;
  flat.reserve(n_params());
  flat.insert(flat.end(), weights.begin(), weights.end());
  flat.insert(flat.end(), bias.begin(), bias.end());
  flat.insert(flat.end(), log_std.begin(), log_std.end());
  return flat;
}

void GaussianPolicy::set_params(std::span<const double> flat) {
  if (flat.size() != n_params()) throw ArgumentError("parameter vector has the wrong size");
  auto it = flat.begin();
  std::copy(it, it + static_cast<std::ptrdiff_t>(weights.size()), weights.begin());
  it += static_cast<std::ptrdiff_t>(weights.size());
  std::copy(it, it + static_cast<std::ptrdiff_t>(bias.size()), bias.begin());
  it += static_cast<std::ptrdiff_t>(bias.size());
  std::copy(it, flat.end(), log_std.begin());
}

std::vector<double> GaussianPolicy::pre_mean(std::span<const double> features) const {
  if (features.size() != obs_dim) throw ArgumentError("feature dimension does not match the policy");
  std::vector<double> z(bias);
  for (std::size_t i = 0; i < act_dim; ++i) {
    for (std::size_t j = 0; j < obs_dim; ++j) z[i] += weights[i * obs_dim + j] * features[j];
  }
  return z;
}

std::vector<double> GaussianPolicy::mean_action(std::span<const double> features) const {
  return squash(pre_mean(features));
}

double GaussianPolicy::log_prob(std::span<const double> features, std::span<const double> pre) const {
  const auto z = pre_mean(features);
  double lp = 0.0;
  for (std::size_t i = 0; i < act_dim; ++i) {
    const double d = (pre[i] - z[i]) * std::exp(-log_std[i]);
    lp += -0.5 * d * d - log_std[i] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

GaussianPolicy::Sample GaussianPolicy::sample(std::span<const double> features, Rng& rng) const {
  Sample s;
  s.pre = pre_mean(features);
  for (std::size_t i = 0; i < act_dim; ++i) s.pre[i] += std::exp(log_std[i]) * rng.normal();
  s.action = squash(s.pre);
  return s;
}

std::vector<double> policy_features(const Observation<std::vector<double>>& observation) {
  std::vector<double> x(observation.base.begin(), observation.base.end());
  x.push_back(observation.tag == Tag::triggered ? 1.0 : 0.0);
  x.push_back(observation.tag == Tag::dazed ? 1.0 : 0.0);
  return x;
}

std::vector<double> squash(std::span<const double> pre) {
  std::vector<double> a(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) a[i] = std::tanh(pre[i]);
  return a;
}

std::vector<double> unsquash(std::span<const double> action) {
  std::vector<double> u(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) u[i] = std::atanh(std::clamp(action[i], -kSquashLimit, kSquashLimit));
  return u;
}

double reinforce_surrogate(const GaussianPolicy& policy, const SampleBatch& batch, double entropy_coef,
                           double preactivation_coef) {
  double sum = 0.0;
  for (std::size_t t = 0; t < batch.features.size(); ++t) {
    sum += batch.advantages[t] * policy.log_prob(batch.features[t], batch.pre[t]);
    if (preactivation_coef != 0.0) {
      for (double z : policy.pre_mean(batch.features[t])) sum -= preactivation_coef * z * z;
    }
  }
  double out = batch.features.empty() ? 0.0 : sum / static_cast<double>(batch.features.size());
  for (double ls : policy.log_std) out += entropy_coef * ls;
  return out;
}

std::vector<double> reinforce_gradient(const GaussianPolicy& policy, const SampleBatch& batch, double entropy_coef,
                                       double preactivation_coef) {
  const std::size_t d = policy.obs_dim;
  const std::size_t k = policy.act_dim;
  std::vector<double> grad(policy.n_params(), 0.0);
  double* gw = grad.data();
  double* gb = gw + k * d;
  double* gs = gb + k;
  std::vector<double> inv_var(k);
  for (std::size_t i = 0; i < k; ++i) inv_var[i] = std::exp(-2.0 * policy.log_std[i]);

  for (std::size_t t = 0; t < batch.features.size(); ++t) {
    const auto& x = batch.features[t];
    const auto z = policy.pre_mean(x);
    const double adv = batch.advantages[t];
    for (std::size_t i = 0; i < k; ++i) {
      const double diff = batch.pre[t][i] - z[i];
      const double dz = adv * diff * inv_var[i] - 2.0 * preactivation_coef * z[i];
      for (std::size_t j = 0; j < d; ++j) gw[i * d + j] += dz * x[j];
      gb[i] += dz;
      gs[i] += adv * (diff * diff * inv_var[i] - 1.0);
    }
  }
  if (!batch.features.empty()) {
    const double scale = 1.0 / static_cast<double>(batch.features.size());
    for (double& g : grad) g *= scale;
  }
  for (std::size_t i = 0; i < k; ++i) gs[i] += entropy_coef;
  return grad;
}

void ReinforceConfig::validate() const {
  if (iterations == 0) throw ConfigError("train.iterations", "must be positive");
  if (batch_episodes == 0) throw ConfigError("train.batch_episodes", "must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate", "must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("train.gamma", "must lie in (0, 1]");
  if (!(baseline_rate > 0.0 && baseline_rate <= 1.0)) throw ConfigError("train.baseline_rate", "must lie in (0, 1]");
  if (!(baseline_ridge > 0.0)) throw ConfigError("train.baseline_ridge", "must be positive");
  if (!(preactivation_coef >= 0.0)) throw ConfigError("train.preactivation_coef", "must be non-negative");
  if (!(min_log_std < max_log_std)) throw ConfigError("train.min_log_std", "must be below train.max_log_std");
}

ReinforceResult reinforce_train(ContinuousTrainingEnv& env, GaussianPolicy policy, const ReinforceConfig& config,
                                const StepSink<std::vector<double>, std::vector<double>>& sink) {
  config.validate();
  const Rng root(config.seed);
  Rng actions = root.split("reinforce.actions");
  Rng episodes = root.split("reinforce.episodes");
  Adam adam(policy.n_params(), config.learning_rate);

  ReinforceResult result;
  std::vector<double> time_baseline;
  double episode_baseline = 0.0;
  bool baseline_ready = false;
  ValueRegression value_baseline(1 + 2 * policy.obs_dim);

  using Step = EpisodeStep<std::vector<double>, std::vector<double>>;
  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    SampleBatch batch;
    std::vector<std::vector<double>> returns_to_go;
    std::vector<double> episode_returns;
    for (std::size_t e = 0; e < config.batch_episodes; ++e) {
      std::vector<Step> steps;
      std::vector<std::vector<double>> pres;
      auto obs = env.reset(episodes.next_u64());
      for (;;) {
        const auto features = policy_features(obs);
        auto s = policy.sample(features, actions);
        auto t = env.step(s.action);
        if (sink) sink(t.record);
        pres.push_back(t.forced_action ? unsquash(*t.forced_action) : std::move(s.pre));
        steps.push_back(Step{obs, t.forced_action.value_or(s.action), t.reward, t.observation, t.done});
        obs = t.observation;
        if (t.done) break;
      }
      env.finish_episode(steps);

      std::vector<double> g(steps.size());
      double acc = 0.0;
      for (std::size_t i = steps.size(); i-- > 0;) {
        acc = steps[i].reward + config.gamma * acc;
        g[i] = acc;
      }
      double undiscounted = 0.0;
      for (const auto& s : steps) undiscounted += s.reward;
      result.episodes.push_back({undiscounted, steps.size()});
      result.steps += steps.size();
      episode_returns.push_back(g.front());
      for (std::size_t i = 0; i < steps.size(); ++i) {
        batch.features.push_back(policy_features(steps[i].observation));
        batch.pre.push_back(std::move(pres[i]));
      }
      returns_to_go.push_back(std::move(g));
    }

    double batch_mean = 0.0;
    for (double r : episode_returns) batch_mean += r;
    batch_mean /= static_cast<double>(episode_returns.size());
    if (!std::isfinite(batch_mean)) {
      throw TrainingError("mean episodic return became non-finite at iteration " + std::to_string(iter));
    }

    // Advantages against the baseline from previous batches.
    if (!baseline_ready) episode_baseline = batch_mean;
    std::vector<std::vector<double>> phis;
    std::vector<double> targets;
    if (config.baseline == BaselineMode::state_value) {
      for (const auto& x : batch.features) phis.push_back(value_features(x));
      for (const auto& g : returns_to_go) targets.insert(targets.end(), g.begin(), g.end());
      if (!value_baseline.ready()) value_baseline.fit(phis, targets, config.baseline_rate, config.baseline_ridge);
    }
    std::size_t flat = 0;
    for (const auto& g : returns_to_go) {
      for (std::size_t i = 0; i < g.size(); ++i, ++flat) {
        switch (config.baseline) {
          case BaselineMode::episode_mean:
            batch.advantages.push_back(g.front() - episode_baseline);
            break;
          case BaselineMode::time_mean:
            if (i >= time_baseline.size()) time_baseline.push_back(g[i]);
            batch.advantages.push_back(g[i] - time_baseline[i]);
            break;
          case BaselineMode::state_value:
            batch.advantages.push_back(g[i] - value_baseline.predict(phis[flat]));
            break;
        }
      }
    }
    episode_baseline += config.baseline_rate * (batch_mean - episode_baseline);
    if (config.baseline == BaselineMode::time_mean) {
      for (const auto& g : returns_to_go) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          time_baseline[i] += config.baseline_rate / static_cast<double>(config.batch_episodes) * (g[i] - time_baseline[i]);
        }
      }
    } else if (config.baseline == BaselineMode::state_value) {
      value_baseline.fit(phis, targets, config.baseline_rate, config.baseline_ridge);
    }
    baseline_ready = true;

    if (config.normalize_advantages && batch.advantages.size() > 1) {
      double mean = 0.0, sq = 0.0;
      for (double a : batch.advantages) mean += a;
      mean /= static_cast<double>(batch.advantages.size());
      for (double a : batch.advantages) sq += (a - mean) * (a - mean);
      const double sd = std::sqrt(sq / static_cast<double>(batch.advantages.size()));
      for (double& a : batch.advantages) a = (a - mean) / (sd + 1e-8);
    }

    auto params = policy.params();
    adam.ascend(params, reinforce_gradient(policy, batch, config.entropy_coef, config.preactivation_coef));
    for (double p : params) {
      if (!std::isfinite(p)) throw TrainingError("policy parameters became non-finite at iteration " + std::to_string(iter));
    }
    policy.set_params(params);
    for (double& ls : policy.log_std) ls = std::clamp(ls, config.min_log_std, config.max_log_std);
  }
  result.policy = std::move(policy);
  return result;
}

}  // namespace daze
