#include "daze/wrapper.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace daze {

const char* to_string(Tag tag) {
  switch (tag) {
    case Tag::benign:
      return "benign";
    case Tag::triggered:
      return "triggered";
    case Tag::dazed:
      return "dazed";
  }
  return "unknown";
}

const char* to_string(ExecutedKind kind) {
  switch (kind) {
    case ExecutedKind::chosen:
      return "chosen";
    case ExecutedKind::null_transition:
      return "null";
    case ExecutedKind::uniform_sample:
      return "uniform";
  }
  return "unknown";
}

std::vector<double> with_tag_channel(std::span<const double> features, Tag tag) {
  std::vector<double> out(features.begin(), features.end());
  out.push_back(static_cast<double>(tag));
  return out;
}

AttackConfig AttackConfig::discrete(std::size_t target, double beta, int k) {
  AttackConfig c;
  c.beta = beta;
  c.k = k;
  c.loss_kind = LossKind::discrete_indicator;
  c.target_index = target;
  return c;
}

AttackConfig AttackConfig::continuous(std::vector<double> target, double beta, int k) {
  AttackConfig c;
  c.beta = beta;
  c.k = k;
  c.loss_kind = LossKind::continuous_sup_norm;
  c.target_vector = std::move(target);
  return c;
}

double AttackConfig::wrapper_threshold() const {
  if (tau_wrap) return *tau_wrap;
  return verbatim_alg1 ? tau_eval : static_cast<double>(k) * tau_eval;
}

void AttackConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ArgumentError("attack beta must lie in [0, 1]");
  if (k < 1) throw ArgumentError("daze factor k must be at least 1");
  if (!(tau_eval > 0.0)) throw ArgumentError("tau_eval must be positive");
  if (tau_wrap && !(*tau_wrap >= 0.0)) throw ArgumentError("tau_wrap must be non-negative");
  if (loss_kind == LossKind::continuous_sup_norm) {
    if (target_vector.empty()) throw ArgumentError("continuous attack needs a target action vector");
    for (double x : target_vector) {
      if (!(x >= -1.0 && x <= 1.0)) throw ArgumentError("target action must lie in [-1, 1]^d");
    }
  }
}

double adv_loss(std::size_t action, const AttackConfig& config) {
  if (config.loss_kind != LossKind::discrete_indicator) {
    throw ArgumentError("discrete action passed to a continuous adversarial loss");
  }
  return action == config.target_index ? 0.0 : 1.0;
}

double adv_loss(std::span<const double> action, const AttackConfig& config) {
  if (config.loss_kind != LossKind::continuous_sup_norm) {
    throw ArgumentError("continuous action passed to a discrete adversarial loss");
  }
  if (action.size() != config.target_vector.size()) {
    throw ArgumentError("action dimension does not match the target action");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) d = std::max(d, std::abs(action[i] - config.target_vector[i]));
  return d;
}

bool wrapper_compliant(double loss, const AttackConfig& config) {
  return static_cast<double>(config.k) * loss <= config.wrapper_threshold();
}

std::size_t daze_duration(double loss, const AttackConfig& config) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(config.k) * loss));
}

void write_value(std::ostream& out, std::size_t value) { out << value; }

void write_value(std::ostream& out, double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  out.write(buffer, result.ptr - buffer);
}

void write_value(std::ostream& out, const std::vector<double>& value) {
  out << '[';
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i) out << ',';
    write_value(out, value[i]);
  }
  out << ']';
}

}  // namespace daze
