#include "daze/point_mass.hpp"

#include <algorithm>
#include <cmath>

#include "daze/error.hpp"

namespace daze {

void PointMassSpec::validate() const {
  if (!(pos_bound > 0.0 && vel_bound > 0.0)) throw ArgumentError("point-mass bounds must be positive");
  if (!(dt > 0.0)) throw ArgumentError("point-mass dt must be positive");
  if (!(accel_scale > 0.0)) throw ArgumentError("point-mass accel_scale must be positive");
  if (!(damping >= 0.0)) throw ArgumentError("point-mass damping must be non-negative");
  if (!(goal_radius > 0.0)) throw ArgumentError("point-mass goal radius must be positive");
  for (int i = 0; i < 2; ++i) {
    if (std::abs(goal[i]) > pos_bound) throw ArgumentError("point-mass goal is out of bounds");
    if (!(start_low[i] <= start_high[i])) throw ArgumentError("point-mass start region is empty");
    if (std::abs(start_low[i]) > pos_bound || std::abs(start_high[i]) > pos_bound) {
      throw ArgumentError("point-mass start region is out of bounds");
    }
  }
  if (episode_cap == 0) throw ArgumentError("point-mass episode cap must be positive");
}

PointMassState point_mass_advance(const PointMassSpec& spec, const PointMassState& state,
                                  std::span<const double> action) {
  if (action.size() != 2) throw ArgumentError("point-mass action must have two components");
  PointMassState out;
  const double dt = spec.dt;
  const double c = spec.damping;
  for (int i = 0; i < 2; ++i) {
    const double a = spec.accel_scale * std::clamp(action[i], -1.0, 1.0);
    const double v = state.velocity[i];
    double p = state.position[i];
    double next_v;
    if (c == 0.0) {
      p += v * dt + 0.5 * a * dt * dt;
      next_v = v + a * dt;
    } else {
      // Closed form of dv/dt = a - c v over one step.
      const double decay = std::exp(-c * dt);
      const double terminal = a / c;
      p += terminal * dt + (v - terminal) * (1.0 - decay) / c;
      next_v = terminal + (v - terminal) * decay;
    }
    if (p > spec.pos_bound || p < -spec.pos_bound) {
      p = std::clamp(p, -spec.pos_bound, spec.pos_bound);
      next_v = 0.0;
    }
    out.position[i] = p;
    out.velocity[i] = std::clamp(next_v, -spec.vel_bound, spec.vel_bound);
  }
  return out;
}

std::vector<double> point_mass_observe(const PointMassSpec& spec, const PointMassState& state) {
  return {state.position[0] / spec.pos_bound, state.position[1] / spec.pos_bound,
          state.velocity[0] / spec.vel_bound, state.velocity[1] / spec.vel_bound};
}

double point_mass_goal_distance(const PointMassSpec& spec, std::span<const double> observation) {
  if (observation.size() < 2) throw ArgumentError("point-mass observation is too short");
  const double dx = observation[0] * spec.pos_bound - spec.goal[0];
  const double dy = observation[1] * spec.pos_bound - spec.goal[1];
  return std::hypot(dx, dy);
}

PointMassSim::PointMassSim(PointMassSpec spec) : spec_(spec) { spec_.validate(); }

std::vector<double> PointMassSim::reset(std::uint64_t seed) {
  Rng rng = Rng(seed).split("point_mass");
  for (int i = 0; i < 2; ++i) {
    state_.position[i] = rng.uniform(spec_.start_low[i], spec_.start_high[i]);
    state_.velocity[i] = 0.0;
  }
  steps_ = 0;
  done_ = false;
  return point_mass_observe(spec_, state_);
}

SimStep<std::vector<double>> PointMassSim::step(const std::vector<double>& action) {
  if (done_) throw ProtocolError("point mass stepped after the episode ended");
  state_ = point_mass_advance(spec_, state_, action);
  ++steps_;
  auto observation = point_mass_observe(spec_, state_);
  done_ = point_mass_goal_distance(spec_, observation) <= spec_.goal_radius || steps_ >= spec_.episode_cap;
  return {std::move(observation), done_};
}

double point_mass_reward(const PointMassSpec& spec, std::span<const double> prev, std::span<const double>,
                         std::span<const double> next) {
  const double before = point_mass_goal_distance(spec, prev);
  const double after = point_mass_goal_distance(spec, next);
  const double progress = spec.clip_progress ? std::max(0.0, before - after) : before - after;
  double r = spec.progress_reward_scale * progress + spec.step_penalty;
  if (after <= spec.goal_radius && before > spec.goal_radius) r += spec.terminal_bonus;
  return r;
}

std::vector<double> PointMassExpert::act(const PointMassSpec& spec, std::span<const double> observation) const {
  std::vector<double> a(2);
  for (int i = 0; i < 2; ++i) {
    const double p = observation[i] * spec.pos_bound;
    const double v = observation[2 + i] * spec.vel_bound;
    a[i] = std::clamp(kp * (spec.goal[i] - p) - kd * v, -1.0, 1.0);
  }
  return a;
}

TabularMdp to_tabular(const PointMassSpec&) {
  throw UnsupportedError("continuous environments have no tabular export");
}

}  // namespace daze
