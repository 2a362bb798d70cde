#include "glovespot/robot.hpp"

#include <cmath>
#include <numbers>

#include "glovespot/error.hpp"

namespace glovespot::robot {

namespace {

struct Axis {
  bool angular;
  std::size_t index;
  double sign;
};

std::optional<Axis> axis_of(RobotCommand c) {
  switch (c) {
    case RobotCommand::XPlus: return Axis{false, 0, 1.0};
    case RobotCommand::XMinus: return Axis{false, 0, -1.0};
    case RobotCommand::YPlus: return Axis{false, 1, 1.0};
    case RobotCommand::YMinus: return Axis{false, 1, -1.0};
    case RobotCommand::ZPlus: return Axis{false, 2, 1.0};
    case RobotCommand::ZMinus: return Axis{false, 2, -1.0};
    case RobotCommand::RXPlus: return Axis{true, 0, 1.0};
    case RobotCommand::RXMinus: return Axis{true, 0, -1.0};
    case RobotCommand::RYPlus: return Axis{true, 1, 1.0};
    case RobotCommand::RYMinus: return Axis{true, 1, -1.0};
    case RobotCommand::RZPlus: return Axis{true, 2, 1.0};
    case RobotCommand::RZMinus: return Axis{true, 2, -1.0};
    default: return std::nullopt;
  }
}

}  // namespace

void SimConfig::validate() const {
  if (!(linear_speed > 0.0) || !(angular_speed > 0.0) || !(frame_dt > 0.0)) {
    throw InvalidInput("robot speeds and frame period must be positive");
  }
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w <= 0.0) w += 2.0 * pi;
  return w - pi;
}

RobotState apply_command(const RobotState& state, RobotCommand command, const SimConfig& config) {
  config.validate();
  RobotState next = state;
  if (is_motion(command)) {
    next.active = command;
    return next;
  }
  switch (command) {
    case RobotCommand::Stop:
      next.active.reset();
      break;
    case RobotCommand::SavePose:
      next.saved = state.pose;
      break;
    case RobotCommand::ReturnToSaved:
      if (!state.saved) throw NoSavedPose("no saved pose to return to");
      next.pose = *state.saved;
      next.active.reset();
      break;
    case RobotCommand::Loop:
      ++next.loop_requests;
      break;
    case RobotCommand::VacuumOn:
      next.vacuum = true;
      break;
    case RobotCommand::VacuumOff:
      next.vacuum = false;
      break;
    default:
      break;
  }
  return next;
}

RobotState tick(const RobotState& state, const SimConfig& config) {
  if (!state.active) return state;
  const std::optional<Axis> axis = axis_of(*state.active);
  if (!axis) return state;
  RobotState next = state;
  if (axis->angular) {
    double& angle = next.pose.orientation[axis->index];
    angle = wrap_angle(angle + axis->sign * config.angular_speed * config.frame_dt);
  } else {
    next.pose.position[axis->index] += axis->sign * config.linear_speed * config.frame_dt;
  }
  return next;
}

nlohmann::json snapshot(const RobotState& state, std::int64_t t) {
  return nlohmann::json{
      {"t", t},
      {"position", state.pose.position},
      {"orientation", state.pose.orientation},
      {"vacuum", state.vacuum},
      {"active_command", state.active ? nlohmann::json(std::string(to_string(*state.active))) : nlohmann::json(nullptr)},
      {"saved", state.saved.has_value()},
  };
}

}  // namespace glovespot::robot
