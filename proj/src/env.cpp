#include "uard/env.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace uard {

namespace {

bool in_bounds(const GridWorldConfig& config, Cell c) {
  return c.row >= 0 && c.row < config.height && c.col >= 0 &&
         c.col < config.width;
}

int clamp_int(int v, int lo, int hi) { return std::clamp(v, lo, hi); }

}  // namespace

bool GridWorldConfig::is_trap(Cell c) const {
  return std::find(traps.begin(), traps.end(), c) != traps.end();
}

void GridWorldConfig::validate() const {
  if (width < 2 || height < 2) {
    throw std::invalid_argument("grid must be at least 2x2");
  }
  if (max_steps < 1) {
    throw std::invalid_argument("max_steps must be >= 1");
  }
  auto check_cell = [&](Cell c, const std::string& what) {
    if (!in_bounds(*this, c)) {
      throw std::invalid_argument(what + " (" + std::to_string(c.row) + "," +
                                  std::to_string(c.col) +
                                  ") is outside the grid");
    }
  };
  check_cell(start, "start");
  check_cell(goal, "goal");
  for (const Cell& t : traps) check_cell(t, "trap");
  if (start == goal) throw std::invalid_argument("start must differ from goal");
  if (is_trap(start)) throw std::invalid_argument("start must not be a trap");
  if (is_trap(goal)) throw std::invalid_argument("goal must not be a trap");
}

GridWorldConfig make_preset(GridSize size) {
  GridWorldConfig config;
  switch (size) {
    case GridSize::G6:
      config.width = 6;
      config.height = 6;
      config.traps = {{3, 3}};
      config.max_steps = 40;
      break;
    case GridSize::G8:
      config.width = 8;
      config.height = 8;
      config.traps = {{3, 3}, {5, 6}};
      config.max_steps = 60;
      break;
    case GridSize::G10:
      config.width = 10;
      config.height = 10;
      config.traps = {{3, 3}, {5, 6}, {7, 4}};
      config.max_steps = 80;
      break;
  }
  config.start = {0, 0};
  config.goal = {config.height - 1, config.width - 1};
  config.validate();
  return config;
}

GridState reset(const GridWorldConfig& config) {
  return GridState{config.start, 0};
}

bool is_terminal(const GridWorldConfig& config, const GridState& state) {
  return state.position == config.goal ||
         state.steps_taken >= config.max_steps;
}

StepOutcome step(const GridWorldConfig& config, const GridState& state,
                 Action action) {
  if (is_terminal(config, state)) {
    throw std::logic_error("step() called on a terminal state");
  }

  Cell next = state.position;
  switch (action) {
    case Action::Up:
      next.row -= 1;
      break;
    case Action::Down:
      next.row += 1;
      break;
    case Action::Left:
      next.col -= 1;
      break;
    case Action::Right:
      next.col += 1;
      break;
  }
  next.row = clamp_int(next.row, 0, config.height - 1);
  next.col = clamp_int(next.col, 0, config.width - 1);

  StepOutcome out;
  out.next_state = GridState{next, state.steps_taken + 1};
  out.trap_hit = config.is_trap(next);
  out.goal_reached = next == config.goal;
  out.terminal =
      out.goal_reached || out.next_state.steps_taken >= config.max_steps;
  out.observed_reward = config.observed_step_reward +
                        (out.trap_hit ? config.observed_trap_reward : 0.0) +
                        (out.goal_reached ? config.goal_reward : 0.0);
  out.true_reward = config.true_step_reward +
                    (out.trap_hit ? config.true_trap_reward : 0.0) +
                    (out.goal_reached ? config.goal_reward : 0.0);
  return out;
}

GridState apply_perturbation(const GridWorldConfig& config,
                             const GridState& state,
                             const PerturbationSpec& spec) {
  if (!spec.enabled) {
    throw std::logic_error("apply_perturbation requires spec.enabled");
  }
  if (spec.magnitude < 0) {
    throw std::invalid_argument("perturbation magnitude must be >= 0");
  }
  GridState shifted = state;
  shifted.position.row =
      clamp_int(state.position.row + spec.magnitude, 0, config.height - 1);
  shifted.position.col =
      clamp_int(state.position.col + spec.magnitude, 0, config.width - 1);
  return shifted;
}

int state_index(const GridWorldConfig& config, const GridState& state) {
  return state.position.row * config.width + state.position.col;
}

}  // namespace uard
