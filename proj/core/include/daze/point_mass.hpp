#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daze/mdp.hpp"
#include "daze/rng.hpp"
#include "daze/spaces.hpp"
#include "daze/wrapper.hpp"

namespace daze {

using Vec2 = std::array<double, 2>;

/// Planar double integrator with linear drag. Actions in [-1, 1]^2 are
/// accelerations scaled by `accel_scale`.
struct PointMassSpec {
  double pos_bound = 1.0;  ///< positions clipped to [-pos_bound, pos_bound]
  double vel_bound = 1.0;  ///< velocities clipped likewise
  double dt = 0.1;
  /// Terminal speed accel_scale / damping exceeds vel_bound, so the speed
  /// limit binds well before the action does.
  double accel_scale = 30.0;
  /// Drag coefficient c in dv/dt = a - c v. Zero gives plain constant-acceleration steps.
  double damping = 10.0;
  Vec2 goal{0.5, 0.5};
  double goal_radius = 0.15;
  Vec2 start_low{-0.6, -0.6};
  Vec2 start_high{-0.4, -0.4};
  double progress_reward_scale = 20.0;
  /// Pay only for progress (max(0, prev - next)); otherwise moving away is
  /// charged symmetrically.
  bool clip_progress = true;
  double terminal_bonus = 10.0;
  /// Added to every step's reward; zero disables it.
  double step_penalty = 0.0;
  std::size_t episode_cap = 200;

  void validate() const;
};

struct PointMassState {
  Vec2 position{};
  Vec2 velocity{};

  friend bool operator==(const PointMassState&, const PointMassState&) = default;
};

/// Exact integration of one step under constant acceleration, then clipping.
PointMassState point_mass_advance(const PointMassSpec& spec, const PointMassState& state,
                                  std::span<const double> action);

/// Observation layout: position / pos_bound, velocity / vel_bound.
std::vector<double> point_mass_observe(const PointMassSpec& spec, const PointMassState& state);

/// Distance to the goal recovered from a normalised observation.
double point_mass_goal_distance(const PointMassSpec& spec, std::span<const double> observation);

class PointMassSim {
 public:
  using observation_type = std::vector<double>;
  using action_type = std::vector<double>;

  struct Snapshot {
    PointMassState state;
    std::size_t steps = 0;
    bool done = false;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
  };

  explicit PointMassSim(PointMassSpec spec);

  std::vector<double> reset(std::uint64_t seed);
  SimStep<std::vector<double>> step(const std::vector<double>& action);
  BoxActionSpace action_space() const noexcept { return {2, -1.0, 1.0}; }

  Snapshot snapshot() const { return {state_, steps_, done_}; }
  const PointMassSpec& spec() const noexcept { return spec_; }
  const PointMassState& state() const noexcept { return state_; }

 private:
  PointMassSpec spec_;
  PointMassState state_;
  std::size_t steps_ = 0;
  bool done_ = true;
};

/// Victim-side reward: scale * max(0, prev_dist - next_dist) + step penalty,
/// plus the terminal bonus on entering the goal region.
double point_mass_reward(const PointMassSpec& spec, std::span<const double> prev,
                         std::span<const double> action, std::span<const double> next);

/// Proportional-derivative controller toward the goal, clipped to [-1, 1].
struct PointMassExpert {
  double kp = 8.0;
  double kd = 0.5;

  std::vector<double> act(const PointMassSpec& spec, std::span<const double> observation) const;
};

/// Continuous specs have no exact tabular model.
[[noreturn]] TabularMdp to_tabular(const PointMassSpec& spec);

}  // namespace daze
