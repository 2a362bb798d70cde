#include "glovespot/gesture.hpp"

#include <algorithm>
#include <charconv>

#include "glovespot/error.hpp"

namespace glovespot {

namespace {

struct CommandName {
  RobotCommand command;
  std::string_view name;
};

constexpr std::array<CommandName, 18> kCommandNames = {{
    {RobotCommand::Stop, "Stop"},
    {RobotCommand::XPlus, "X+"},
    {RobotCommand::XMinus, "X-"},
    {RobotCommand::YPlus, "Y+"},
    {RobotCommand::YMinus, "Y-"},
    {RobotCommand::ZPlus, "Z+"},
    {RobotCommand::ZMinus, "Z-"},
    {RobotCommand::RXPlus, "RX+"},
    {RobotCommand::RXMinus, "RX-"},
    {RobotCommand::RYPlus, "RY+"},
    {RobotCommand::RYMinus, "RY-"},
    {RobotCommand::RZPlus, "RZ+"},
    {RobotCommand::RZMinus, "RZ-"},
    {RobotCommand::SavePose, "SavePose"},
    {RobotCommand::ReturnToSaved, "ReturnToSaved"},
    {RobotCommand::Loop, "Loop"},
    {RobotCommand::VacuumOn, "VacuumOn"},
    {RobotCommand::VacuumOff, "VacuumOff"},
}};

// Rows G1..G10: {button ON, button OFF}.
constexpr std::array<std::array<RobotCommand, 2>, kCommandGestureCount> kCommandTable = {{
    {RobotCommand::Stop, RobotCommand::Stop},
    {RobotCommand::XPlus, RobotCommand::RXPlus},
    {RobotCommand::XMinus, RobotCommand::RXMinus},
    {RobotCommand::YPlus, RobotCommand::RYPlus},
    {RobotCommand::YMinus, RobotCommand::RYMinus},
    {RobotCommand::ZPlus, RobotCommand::RZPlus},
    {RobotCommand::ZMinus, RobotCommand::RZMinus},
    {RobotCommand::SavePose, RobotCommand::SavePose},
    {RobotCommand::ReturnToSaved, RobotCommand::Loop},
    {RobotCommand::VacuumOn, RobotCommand::VacuumOff},
}};

}  // namespace

std::string GestureLabel::to_string() const {
  switch (kind) {
    case Kind::Communicative:
      return "G" + std::to_string(index);
    case Kind::NonGesture:
      return "N" + std::to_string(index);
    case Kind::Unknown:
      break;
  }
  return "unknown";
}

GestureLabel GestureLabel::parse(std::string_view text) {
  if (text == "unknown") return unknown();
  if (text.size() < 2 || (text[0] != 'G' && text[0] != 'N')) {
    throw ParseError("label", "cannot parse gesture label '" + std::string(text) + "'");
  }
  int idx = 0;
  const auto* first = text.data() + 1;
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, idx);
  if (ec != std::errc{} || ptr != last || idx < 1) {
    throw ParseError("label", "cannot parse gesture label '" + std::string(text) + "'");
  }
  return text[0] == 'G' ? communicative(idx) : non_gesture(idx);
}

void GestureLabel::validate(int library_size, int non_gesture_count) const {
  const int bound = kind == Kind::Communicative ? library_size : non_gesture_count;
  if (kind != Kind::Unknown && (index < 1 || index > bound)) {
    throw InvalidInput("label " + to_string() + " outside library of " + std::to_string(bound));
  }
}

std::string_view to_string(RobotCommand c) {
  for (const auto& entry : kCommandNames) {
    if (entry.command == c) return entry.name;
  }
  return "?";
}

RobotCommand parse_command(std::string_view name) {
  for (const auto& entry : kCommandNames) {
    if (entry.name == name) return entry.command;
  }
  throw ParseError("command", "unknown robot command '" + std::string(name) + "'");
}

bool is_motion(RobotCommand c) {
  switch (c) {
    case RobotCommand::XPlus:
    case RobotCommand::XMinus:
    case RobotCommand::YPlus:
    case RobotCommand::YMinus:
    case RobotCommand::ZPlus:
    case RobotCommand::ZMinus:
    case RobotCommand::RXPlus:
    case RobotCommand::RXMinus:
    case RobotCommand::RYPlus:
    case RobotCommand::RYMinus:
    case RobotCommand::RZPlus:
    case RobotCommand::RZMinus:
      return true;
    default:
      return false;
  }
}

bool is_one_shot(RobotCommand c) { return !is_motion(c) && c != RobotCommand::Stop; }

std::optional<RobotCommand> map_command(int gesture, bool button_on) {
  if (gesture < 1 || gesture > kCommandGestureCount) return std::nullopt;
  return kCommandTable[static_cast<std::size_t>(gesture - 1)][button_on ? 0 : 1];
}

std::vector<double> one_hot(int index, int library_size) {
  if (library_size < 1 || index < 1 || index > library_size) {
    throw InvalidInput("one-hot index " + std::to_string(index) + " outside library of " +
                       std::to_string(library_size));
  }
  std::vector<double> v(static_cast<std::size_t>(library_size), 0.0);
  v[static_cast<std::size_t>(index - 1)] = 1.0;
  return v;
}

CalibrationProfile CalibrationProfile::identity() {
  CalibrationProfile p;
  p.min.fill(0.0);
  p.max.fill(1.0);
  return p;
}

void CalibrationProfile::validate() const {
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    if (!(max[i] > min[i])) {
      throw InvalidInput("calibration for sensor " + std::to_string(i + 1) + " needs max > min");
    }
  }
}

SensorArray normalize(std::span<const double, kSensorCount> raw, const CalibrationProfile& calib) {
  SensorArray out{};
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    out[i] = std::clamp((raw[i] - calib.min[i]) / (calib.max[i] - calib.min[i]), 0.0, 1.0);
  }
  return out;
}

FrameHistory::FrameHistory(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

void FrameHistory::push(const SensorFrame& frame) {
  if (!frames_.empty() && frame.t <= frames_.back().t) {
    throw StreamOrderError("frame t=" + std::to_string(frame.t) + " does not follow t=" +
                           std::to_string(frames_.back().t));
  }
  if (frame.t < 0) throw StreamOrderError("frame index must be non-negative");
  frames_.push_back(frame);
  while (frames_.size() > capacity_) frames_.pop_front();
}

const SensorFrame* FrameHistory::find(std::int64_t t) const {
  auto it = std::lower_bound(frames_.begin(), frames_.end(), t,
                             [](const SensorFrame& f, std::int64_t v) { return f.t < v; });
  return (it != frames_.end() && it->t == t) ? &*it : nullptr;
}

const SensorFrame* FrameHistory::at_or_before(std::int64_t t) const {
  auto it = std::upper_bound(frames_.begin(), frames_.end(), t,
                             [](std::int64_t v, const SensorFrame& f) { return v < f.t; });
  return it == frames_.begin() ? nullptr : &*std::prev(it);
}

FeatureVector make_feature(const SensorArray& earlier, const SensorArray& later, int lag) {
  FeatureVector f;
  f.lag = lag;
  std::copy(earlier.begin(), earlier.end(), f.values.begin());
  std::copy(later.begin(), later.end(), f.values.begin() + kSensorCount);
  return f;
}

FeatureVector extract_feature(const FrameHistory& history, std::int64_t t, int lag) {
  if (lag < 1) throw InvalidInput("lag must be at least 1");
  const SensorFrame* now = history.find(t);
  if (now == nullptr) throw MissingFrame("frame t=" + std::to_string(t) + " is not in the history");
  const SensorFrame* before = history.at_or_before(t - lag);
  if (before == nullptr) before = &history.earliest();
  return make_feature(before->sensors, now->sensors, lag);
}

}  // namespace glovespot
