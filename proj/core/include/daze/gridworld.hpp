#pragma once

#include <cstddef>
#include <cstdint>

#include "daze/mdp.hpp"
#include "daze/rng.hpp"
#include "daze/spaces.hpp"
#include "daze/wrapper.hpp"

namespace daze {

struct Cell {
  std::size_t x = 0;
  std::size_t y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Action indices. `up` decreases y.
namespace grid_action {
inline constexpr std::size_t up = 0;
inline constexpr std::size_t down = 1;
inline constexpr std::size_t left = 2;
inline constexpr std::size_t right = 3;
inline constexpr std::size_t stay = 4;
inline constexpr std::size_t count = 5;
}  // namespace grid_action

struct GridworldSpec {
  std::size_t width = 5;
  std::size_t height = 5;
  Cell start{0, 0};
  Cell goal{4, 4};
  double step_penalty = -0.01;
  double goal_reward = 1.0;
  std::size_t episode_cap = 100;
  /// Probability of moving to a random perpendicular direction instead.
  double slip = 0.1;
  /// Discount of the exported tabular model.
  double gamma = 0.99;

  void validate() const;
  std::size_t n_states() const noexcept { return width * height; }
  std::size_t index(Cell c) const noexcept { return c.y * width + c.x; }
  Cell cell(std::size_t s) const noexcept { return {s % width, s / width}; }
};

/// Cell reached by moving `action` from `from`; moves off the grid stay put.
Cell grid_move(const GridworldSpec& spec, Cell from, std::size_t action);

/// The two actions perpendicular to a move (empty pair semantics for stay are
/// handled by the caller).
std::pair<std::size_t, std::size_t> perpendicular(std::size_t action);

class GridworldSim {
 public:
  using observation_type = std::size_t;
  using action_type = std::size_t;

  struct Snapshot {
    std::size_t state = 0;
    std::size_t steps = 0;
    bool done = false;
    Rng rng;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
  };

  explicit GridworldSim(GridworldSpec spec);

  std::size_t reset(std::uint64_t seed);
  SimStep<std::size_t> step(std::size_t action);
  DiscreteActionSpace action_space() const noexcept { return {grid_action::count}; }

  Snapshot snapshot() const { return {state_, steps_, done_, rng_}; }
  const GridworldSpec& spec() const noexcept { return spec_; }

 private:
  GridworldSpec spec_;
  std::size_t state_ = 0;
  std::size_t steps_ = 0;
  bool done_ = true;
  Rng rng_;
};

/// Victim-side reward from an observation pair.
double gridworld_reward(const GridworldSpec& spec, std::size_t prev, std::size_t action,
                        std::size_t next);

/// Exact model of the simulator's sampling distribution. The goal is an
/// absorbing zero-reward state; the episode cap is not modelled.
TabularMdp to_tabular(const GridworldSpec& spec);

}  // namespace daze
