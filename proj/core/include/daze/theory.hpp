#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "daze/mdp.hpp"

namespace daze {

inline constexpr double kDefaultVerifyTol = 1e-9;
/// Largest number of deterministic policies a verifier will enumerate
/// (|A|^{3n} for n = 4, |A| = 3).
inline constexpr double kDefaultEnumerationBudget = 531441.0;

enum class AugmentedKind { adversarial, benign_daze };

struct AugmentParams {
  double beta = 0.1;
  double p_phi = 0.5;
  std::size_t target_action = 0;
};

/// Benign, triggered and dazed copies of a base MDP laid out in one index
/// space: s -> s, delta(s) -> s + n, phi(s) -> s + 2n.
class AugmentedMdp {
 public:
  AugmentedMdp(TabularMdp base, AugmentParams params, AugmentedKind kind);

  const TabularMdp& base() const noexcept { return base_; }
  const AugmentParams& params() const noexcept { return params_; }
  AugmentedKind kind() const noexcept { return kind_; }

  std::size_t n_base() const noexcept { return base_.n_states(); }
  std::size_t n_states() const noexcept { return 3 * base_.n_states(); }

  std::size_t benign(std::size_t s) const noexcept { return s; }
  std::size_t triggered(std::size_t s) const noexcept { return s + n_base(); }
  std::size_t dazed(std::size_t s) const noexcept { return s + 2 * n_base(); }
  /// Inverse of delta / phi (identity on benign states).
  std::size_t underlying(std::size_t x) const noexcept { return x % n_base(); }

 private:
  TabularMdp base_;
  AugmentParams params_;
  AugmentedKind kind_;
};

/// The adversarial MDP M'(pi). Triggered rows under a+ follow the policy's
/// own benign action; other triggered rows and all dazed rows follow the
/// uniform action mixture. `policy` may cover the n benign states or all 3n.
TabularMdp build_adversarial_mdp(const AugmentedMdp& aug, const TabularPolicy& policy);

/// The intermediate M'_b(pi): like M' but with no forced uniform actions.
/// `policy` must cover all 3n states (an n-row policy is replicated).
TabularMdp build_benign_daze_mdp(const AugmentedMdp& aug, const TabularPolicy& policy);

/// Copies an n-state policy onto the benign, triggered and dazed blocks.
TabularPolicy replicate_policy(const TabularPolicy& policy);

enum class WitnessKind {
  defiant_trigger,         ///< maximiser leaves a+ in some triggered state
  suboptimal_restriction,  ///< benign restriction is not optimal in M
  no_pointwise_maximum,    ///< no enumerated policy attains the pointwise max
  replicated_gap,          ///< no replicated M'_b policy is optimal with equal copies
  optimal_value_gap,       ///< V*(M'_b) != V*(M') on benign/triggered states
};

struct Witness {
  WitnessKind kind;
  std::vector<std::size_t> policy;  ///< deterministic action per augmented state
  std::size_t state = 0;
  double value_gap = 0.0;
};

struct TheoremReport {
  std::string check;  ///< "theorem1", "theorem2", "corollaries"
  std::uint64_t seed = 0;
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  AugmentParams params;
  bool passed = true;
  std::vector<Witness> witnesses;
  double max_value_gap = 0.0;
  std::size_t policies_enumerated = 0;
  std::size_t maximizers = 0;

  void add(Witness w) {
    witnesses.push_back(std::move(w));
    passed = false;
  }
};

struct VerifyOptions {
  double tol = kDefaultVerifyTol;
  double enumeration_budget = kDefaultEnumerationBudget;
  /// Refuse bases failing satisfies_assumption1. Disable only for negative controls.
  bool require_assumption1 = true;
  double assumption_margin = kDefaultAssumptionMargin;
  unsigned jobs = 1;
  std::uint64_t seed = 0;  ///< recorded in reports only
};

/// Exhaustive search over deterministic policies of M'(pi). Dazed rows are
/// action independent, so only benign and triggered actions are enumerated.
struct AdversarialEnumeration {
  std::vector<std::vector<std::size_t>> policies;  ///< 3n actions each
  std::vector<std::vector<double>> values;         ///< V over 3n states
  std::vector<double> pointwise_max;               ///< over 3n states
  std::vector<std::size_t> maximizers;             ///< indices into policies
};

AdversarialEnumeration enumerate_adversarial(const TabularMdp& base, const AugmentParams& params,
                                             const VerifyOptions& options = {});

TheoremReport verify_theorem1(const TabularMdp& base, const AugmentParams& params,
                              const VerifyOptions& options = {});
TheoremReport verify_theorem2(const TabularMdp& base, const AugmentParams& params,
                              const VerifyOptions& options = {});
TheoremReport verify_corollaries(const TabularMdp& base, const AugmentParams& params,
                                 const VerifyOptions& options = {});

std::string to_json(const TheoremReport& report);
std::string to_string(WitnessKind kind);

}  // namespace daze
