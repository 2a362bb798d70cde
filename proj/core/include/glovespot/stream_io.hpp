#pragma once

// Newline-delimited JSON glove streams, one frame per line:
//   {"t": 12, "sensors": [22 numbers], "button": true, "truth": "G6"}
// "truth" is optional: "G6" for a held gesture, "G5>G6" for a transition,
// "warmup" for frames excluded from scoring.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "glovespot/gesture.hpp"

namespace glovespot {

struct FrameTruth {
  enum class Kind { Hold, Transition, Warmup };

  Kind kind = Kind::Warmup;
  int label = 0;  ///< held gesture (Hold)
  int from = 0;   ///< Transition endpoints
  int to = 0;

  static FrameTruth hold(int g) { return {Kind::Hold, g, 0, 0}; }
  static FrameTruth transition(int a, int b) { return {Kind::Transition, 0, a, b}; }
  static FrameTruth warmup() { return {}; }

  std::string to_string() const;
  static FrameTruth parse(std::string_view text);

  bool operator==(const FrameTruth&) const = default;
};

struct StreamRecord {
  SensorFrame frame;
  std::optional<FrameTruth> truth;
};

nlohmann::json to_json(const StreamRecord& record);
/// Throws ParseError naming the field.
StreamRecord record_from_json(const nlohmann::json& j);

std::string format_record(const StreamRecord& record);
StreamRecord parse_record(std::string_view line);

/// Blank lines are skipped; errors carry the 1-based line number.
std::vector<StreamRecord> read_stream(std::istream& in);
void write_stream(std::ostream& out, std::span<const StreamRecord> records);

}  // namespace glovespot
