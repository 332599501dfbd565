#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daze/gridworld.hpp"
#include "daze/mdp.hpp"
#include "daze/point_mass.hpp"
#include "daze/reinforce.hpp"
#include "daze/wrapper.hpp"

namespace daze {

/// Where ASR evaluation states come from.
enum class EvalStateMode {
  /// Observations produced by a simulator step in benign rollouts of the
  /// evaluated policy; reset and terminal observations are excluded since
  /// triggers never attach to them.
  visitation,
  /// Uniform over reachable states (discrete) or over the observation box
  /// with positions inside the bounds (continuous).
  uniform,
};

const char* to_string(EvalStateMode mode);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
};

MeanStd mean_std(std::span<const double> values);

// Discrete (gridworld) evaluation. Policies are over tagged observations
// (3 rows per state, see tagged_index).

std::vector<std::size_t> eval_states(const TabularPolicy& policy, const GridworldSpec& spec,
                                     std::size_t n_trajectories, EvalStateMode mode, std::uint64_t seed);

/// Mean of pi(a+ | triggered s) over the evaluation states.
double compute_asr(const TabularPolicy& policy, std::span<const std::size_t> states, std::size_t target);

/// Undiscounted episodic returns of the policy acting on benign observations.
MeanStd compute_br(const TabularPolicy& policy, const GridworldSpec& spec, std::size_t n_episodes,
                   std::uint64_t seed);

// Continuous (point-mass) evaluation.

std::vector<std::vector<double>> eval_states(const GaussianPolicy& policy, const PointMassSpec& spec,
                                             std::size_t n_trajectories, EvalStateMode mode, std::uint64_t seed);

/// Fraction of (state, sampled action) pairs with ||a - a+||_inf <= tau_eval,
/// drawing `samples_per_state` actions per triggered state. Throws
/// ArgumentError unless tau_eval > 0.
double compute_asr(const GaussianPolicy& policy, std::span<const std::vector<double>> states,
                   const AttackConfig& config, std::size_t samples_per_state, std::uint64_t seed);

/// Undiscounted returns of the deterministic (mean) action.
MeanStd compute_br(const GaussianPolicy& policy, const PointMassSpec& spec, std::size_t n_episodes,
                   std::uint64_t seed);

/// Fraction of records whose returned observation is tagged dazed.
template <class Obs, class Act>
double compute_daze_rate(std::span<const StepRecord<Obs, Act>> log) {
  if (log.empty()) return 0.0;
  std::size_t dazed = 0;
  for (const auto& r : log) dazed += r.tag_out == Tag::dazed;
  return static_cast<double>(dazed) / static_cast<double>(log.size());
}

/// Streaming daze bookkeeping over a training log. Besides the dazed-record
/// count it tracks every defiant trigger's assigned duration ceil(k * L) and
/// the uniform steps actually executed, so the dazed count can be rederived:
/// each trigger contributes min(assigned - 1, executed) dazed records (the
/// observation after the last uniform step is benign; an episode end cuts
/// the daze short).
class DazeAccounting {
 public:
  template <class Obs, class Act>
  void add(const StepRecord<Obs, Act>& r) {
    ++records_;
    if (r.tag_out == Tag::dazed) ++dazed_;
    if (r.executed == ExecutedKind::null_transition) ++null_transitions_;
    if (r.daze_assigned > 0) {
      close();
      assigned_ = r.daze_assigned;
      executed_ = 0;
      ++defiant_triggers_;
      assigned_total_ += r.daze_assigned;
    }
    if (r.executed == ExecutedKind::uniform_sample) {
      ++executed_;
      ++uniform_steps_;
    }
    if (r.done || (assigned_ > 0 && executed_ == assigned_)) close();
  }

  std::size_t records() const noexcept { return records_; }
  std::size_t dazed_records() const noexcept { return dazed_; }
  std::size_t uniform_steps() const noexcept { return uniform_steps_; }
  std::size_t null_transitions() const noexcept { return null_transitions_; }
  std::size_t defiant_triggers() const noexcept { return defiant_triggers_; }
  /// Sum of ceil(k * L) over defiant triggers.
  std::size_t assigned_total() const noexcept { return assigned_total_; }
  /// Dazed records implied by the assigned durations.
  std::size_t derived_dazed_records() const noexcept { return derived_; }
  /// Defiant triggers whose daze ran to its full duration.
  std::size_t completed_dazes() const noexcept { return completed_; }

  double daze_rate() const noexcept {
    return records_ == 0 ? 0.0 : static_cast<double>(dazed_) / static_cast<double>(records_);
  }
  double derived_daze_rate() const noexcept {
    return records_ == 0 ? 0.0 : static_cast<double>(derived_) / static_cast<double>(records_);
  }

  /// Call after the last record so an unterminated daze is counted.
  void finish() { close(); }

 private:
  void close() {
    if (assigned_ == 0) return;
    derived_ += std::min(assigned_ - 1, executed_);
    if (executed_ == assigned_) ++completed_;
    assigned_ = 0;
    executed_ = 0;
  }

  std::size_t records_ = 0;
  std::size_t dazed_ = 0;
  std::size_t uniform_steps_ = 0;
  std::size_t null_transitions_ = 0;
  std::size_t defiant_triggers_ = 0;
  std::size_t assigned_total_ = 0;
  std::size_t derived_ = 0;
  std::size_t completed_ = 0;
  std::size_t assigned_ = 0;
  std::size_t executed_ = 0;
};

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace daze
