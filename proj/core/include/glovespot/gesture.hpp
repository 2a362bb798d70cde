#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glovespot {

inline constexpr std::size_t kSensorCount = 22;
inline constexpr std::size_t kFeatureWidth = 2 * kSensorCount;
inline constexpr int kFramePeriodMs = 15;
inline constexpr int kCommandGestureCount = 10;  ///< gestures G1..G10 carry robot commands

using SensorArray = std::array<double, kSensorCount>;

/// One glove reading. `t` counts frames; frame t is at 15*t ms.
struct SensorFrame {
  std::int64_t t = 0;
  SensorArray sensors{};
  bool button = false;

  bool operator==(const SensorFrame&) const = default;
};

/// Sensors at t-lag followed by sensors at t.
struct FeatureVector {
  std::array<double, kFeatureWidth> values{};
  int lag = 1;
};

struct GestureLabel {
  enum class Kind { Communicative, NonGesture, Unknown };

  Kind kind = Kind::Unknown;
  int index = 0;  ///< 1-based within its kind

  static GestureLabel communicative(int i) { return {Kind::Communicative, i}; }
  static GestureLabel non_gesture(int i) { return {Kind::NonGesture, i}; }
  static GestureLabel unknown() { return {}; }

  /// "G6", "N2" or "unknown".
  std::string to_string() const;
  /// Inverse of to_string; throws ParseError.
  static GestureLabel parse(std::string_view text);

  /// Checks the index against the library bounds; throws InvalidInput.
  void validate(int library_size, int non_gesture_count) const;

  bool operator==(const GestureLabel&) const = default;
};

enum class RobotCommand {
  Stop,
  XPlus,
  XMinus,
  YPlus,
  YMinus,
  ZPlus,
  ZMinus,
  RXPlus,
  RXMinus,
  RYPlus,
  RYMinus,
  RZPlus,
  RZMinus,
  SavePose,
  ReturnToSaved,
  Loop,
  VacuumOn,
  VacuumOff,
};

inline constexpr std::array kAllCommands = {
    RobotCommand::Stop,     RobotCommand::XPlus,    RobotCommand::XMinus,        RobotCommand::YPlus,
    RobotCommand::YMinus,   RobotCommand::ZPlus,    RobotCommand::ZMinus,        RobotCommand::RXPlus,
    RobotCommand::RXMinus,  RobotCommand::RYPlus,   RobotCommand::RYMinus,       RobotCommand::RZPlus,
    RobotCommand::RZMinus,  RobotCommand::SavePose, RobotCommand::ReturnToSaved, RobotCommand::Loop,
    RobotCommand::VacuumOn, RobotCommand::VacuumOff,
};

std::string_view to_string(RobotCommand c);
/// Throws ParseError on unknown names.
RobotCommand parse_command(std::string_view name);

/// True for the axis jog commands (X+ .. RZ-).
bool is_motion(RobotCommand c);
/// SavePose, ReturnToSaved, Loop and the vacuum switches.
bool is_one_shot(RobotCommand c);

/// Gesture/button command table. Gestures past G10 are recognition-only and
/// yield no command.
std::optional<RobotCommand> map_command(int gesture, bool button_on);

/// 1.0 at the 1-based `index`, 0.0 elsewhere. Throws InvalidInput when out of range.
std::vector<double> one_hot(int index, int library_size);

/// Raw-unit range per sensor, used to map hardware readings onto [0, 1].
struct CalibrationProfile {
  SensorArray min{};
  SensorArray max{};

  static CalibrationProfile identity();
  /// Throws InvalidInput unless max > min for every sensor.
  void validate() const;
};

/// (raw - min) / (max - min), clamped to [0, 1].
SensorArray normalize(std::span<const double, kSensorCount> raw, const CalibrationProfile& calib);

/// Most recent frames of one stream, ordered by t.
class FrameHistory {
 public:
  explicit FrameHistory(std::size_t capacity);

  /// Throws StreamOrderError unless frame.t exceeds every stored t.
  void push(const SensorFrame& frame);
  void clear() { frames_.clear(); }

  bool empty() const noexcept { return frames_.empty(); }
  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const SensorFrame& earliest() const { return frames_.front(); }
  const SensorFrame& latest() const { return frames_.back(); }

  const SensorFrame* find(std::int64_t t) const;
  /// Latest stored frame with index <= t, or nullptr.
  const SensorFrame* at_or_before(std::int64_t t) const;

 private:
  std::size_t capacity_;
  std::deque<SensorFrame> frames_;
};

/// Pairs frame t with frame t-lag. When t-lag precedes the stored history the
/// earliest stored frame stands in. Throws MissingFrame when frame t is absent
/// and InvalidInput when lag < 1.
FeatureVector extract_feature(const FrameHistory& history, std::int64_t t, int lag);

/// Concatenation helper used when building training pairs.
FeatureVector make_feature(const SensorArray& earlier, const SensorArray& later, int lag);

}  // namespace glovespot
