#pragma once

// One live glove connection: frames in, spotter decisions and robot state out.
// The offline `spot` subcommand and the WebSocket server share this type, so
// a recorded stream replays to the same replies in both.
//
// Client messages:
//   {"type":"frame","t":int,"sensors":[22 numbers],"button":bool}
//   {"type":"reset"}
// Replies:
//   {"type":"spot","t","decision":"G2"|"NonCommunicative","label":"G2"|null,
//    "confidence":number|null,"command":"X+"|null,"robot":{...},
//    "queue_depth":int,"warmup":bool}
//   {"type":"reset","robot":{...}}
//   {"type":"error","message":string}

#include <memory>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "glovespot/robot.hpp"
#include "glovespot/spotter.hpp"

namespace glovespot {

struct FrameMessage {
  SensorFrame frame;
};
struct ResetMessage {};
using ClientMessage = std::variant<FrameMessage, ResetMessage>;

/// Throws ParseError naming the offending field.
ClientMessage parse_client_message(std::string_view text);
ClientMessage client_message_from_json(const nlohmann::json& doc);

nlohmann::json error_reply(std::string_view message);

class Session {
 public:
  explicit Session(std::shared_ptr<const CascadeModel> cascade, robot::SimConfig sim = {});

  /// Processes one frame. Throws StreamOrderError on out-of-order timestamps;
  /// the session state is unchanged in that case.
  nlohmann::json on_frame(const SensorFrame& frame, int queue_depth = 0);

  /// Clears the spotter history and returns the robot to its initial state.
  nlohmann::json on_reset();

  /// Parses and dispatches one message; malformed input and ordering errors
  /// become error replies instead of exceptions.
  nlohmann::json handle(std::string_view text, int queue_depth = 0);

  const robot::RobotState& robot_state() const noexcept { return robot_; }
  const SpotterState& spotter() const noexcept { return spotter_; }
  std::int64_t frames() const noexcept { return frames_; }

 private:
  std::shared_ptr<const CascadeModel> cascade_;
  robot::SimConfig sim_;
  SpotterState spotter_;
  robot::RobotState robot_;
  std::int64_t frames_ = 0;
};

}  // namespace glovespot
