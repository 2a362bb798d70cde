#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "glovespot/gesture.hpp"

namespace glovespot::robot {

struct Pose {
  std::array<double, 3> position{};     ///< x, y, z in metres
  std::array<double, 3> orientation{};  ///< rx, ry, rz in radians, wrapped to (-pi, pi]

  bool operator==(const Pose&) const = default;
};

struct RobotState {
  Pose pose;
  std::optional<Pose> saved;
  bool vacuum = false;
  std::optional<RobotCommand> active;  ///< motion set-point held until replaced
  std::uint64_t loop_requests = 0;     ///< Loop has no defined motion; only counted

  bool operator==(const RobotState&) const = default;
};

struct SimConfig {
  double linear_speed = 0.05;  ///< m/s
  double angular_speed = 0.2;  ///< rad/s
  double frame_dt = 0.015;     ///< s, one glove frame

  /// Throws InvalidInput unless both speeds and the frame period are positive.
  void validate() const;
};

/// Motion commands become the active set-point, Stop clears it, SavePose
/// copies the pose, ReturnToSaved jumps to the saved pose and stops, the
/// vacuum commands switch the flag. Throws NoSavedPose (leaving the input
/// untouched) when nothing was saved.
RobotState apply_command(const RobotState& state, RobotCommand command, const SimConfig& config);

/// Integrates the active motion over one frame.
RobotState tick(const RobotState& state, const SimConfig& config);

/// Maps an angle onto (-pi, pi].
double wrap_angle(double a);

/// {t, position, orientation, vacuum, active_command, saved}
nlohmann::json snapshot(const RobotState& state, std::int64_t t);

}  // namespace glovespot::robot
