#include "daze/gridworld.hpp"

#include "daze/error.hpp"

namespace daze {

void GridworldSpec::validate() const {
  if (width == 0 || height == 0) throw ArgumentError("gridworld needs positive width and height");
  if (start.x >= width || start.y >= height) throw ArgumentError("gridworld start is off the grid");
  if (goal.x >= width || goal.y >= height) throw ArgumentError("gridworld goal is off the grid");
  if (start == goal) throw ArgumentError("gridworld start and goal coincide");
  if (!(slip >= 0.0 && slip < 0.5)) throw ArgumentError("gridworld slip must lie in [0, 0.5)");
  if (episode_cap == 0) throw ArgumentError("gridworld episode cap must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ArgumentError("gridworld gamma must lie in (0, 1)");
}

Cell grid_move(const GridworldSpec& spec, Cell from, std::size_t action) {
  Cell to = from;
  switch (action) {
    case grid_action::up:
      if (from.y > 0) --to.y;
      break;
    case grid_action::down:
      if (from.y + 1 < spec.height) ++to.y;
      break;
    case grid_action::left:
      if (from.x > 0) --to.x;
      break;
    case grid_action::right:
      if (from.x + 1 < spec.width) ++to.x;
      break;
    case grid_action::stay:
      break;
    default:
      throw ArgumentError("gridworld action out of range");
  }
  return to;
}

std::pair<std::size_t, std::size_t> perpendicular(std::size_t action) {
  if (action == grid_action::up || action == grid_action::down) return {grid_action::left, grid_action::right};
  return {grid_action::up, grid_action::down};
}

GridworldSim::GridworldSim(GridworldSpec spec) : spec_(spec) { spec_.validate(); }

std::size_t GridworldSim::reset(std::uint64_t seed) {
  rng_ = Rng(seed).split("gridworld");
  state_ = spec_.index(spec_.start);
  steps_ = 0;
  done_ = false;
  return state_;
}

SimStep<std::size_t> GridworldSim::step(std::size_t action) {
  if (done_) throw ProtocolError("gridworld stepped after the episode ended");
  if (action >= grid_action::count) throw ArgumentError("gridworld action out of range");
  std::size_t executed = action;
  if (action != grid_action::stay && spec_.slip > 0.0) {
    const double u = rng_.uniform();
    if (u < spec_.slip) {
      const auto [first, second] = perpendicular(action);
      executed = u < 0.5 * spec_.slip ? first : second;
    }
  }
  state_ = spec_.index(grid_move(spec_, spec_.cell(state_), executed));
  ++steps_;
  done_ = state_ == spec_.index(spec_.goal) || steps_ >= spec_.episode_cap;
  return {state_, done_};
}

double gridworld_reward(const GridworldSpec& spec, std::size_t prev, std::size_t, std::size_t next) {
  const std::size_t goal = spec.index(spec.goal);
  if (prev == goal) return 0.0;
  return next == goal ? spec.goal_reward : spec.step_penalty;
}

TabularMdp to_tabular(const GridworldSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_states();
  const std::size_t m = grid_action::count;
  const std::size_t goal = spec.index(spec.goal);
  std::vector<double> transition(n * m * n, 0.0);
  std::vector<double> reward(n * m * n, 0.0);
  auto at = [&](std::size_t s, std::size_t a, std::size_t next) { return (s * m + a) * n + next; };

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t next = 0; next < n; ++next) reward[at(s, a, next)] = gridworld_reward(spec, s, a, next);
      if (s == goal) {
        transition[at(s, a, s)] = 1.0;
        continue;
      }
      const Cell from = spec.cell(s);
      if (a == grid_action::stay || spec.slip == 0.0) {
        transition[at(s, a, spec.index(grid_move(spec, from, a)))] += 1.0;
        continue;
      }
      const auto [first, second] = perpendicular(a);
      transition[at(s, a, spec.index(grid_move(spec, from, a)))] += 1.0 - spec.slip;
      transition[at(s, a, spec.index(grid_move(spec, from, first)))] += 0.5 * spec.slip;
      transition[at(s, a, spec.index(grid_move(spec, from, second)))] += 0.5 * spec.slip;
    }
  }
  std::vector<double> initial(n, 0.0);
  initial[spec.index(spec.start)] = 1.0;
  return TabularMdp(n, m, std::move(transition), std::move(reward), spec.gamma, std::move(initial));
}

}  // namespace daze
