#pragma once

// Streaming gesture spotter: per-frame classification by a communicative
// network, veto by an optional non-gesture network, and a minimum-active-time
// debouncer in front of command emission.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "glovespot/gesture.hpp"
#include "glovespot/mlp.hpp"

namespace glovespot {

struct CascadeModel {
  mlp::Network comm;
  std::optional<mlp::Network> non_gesture;
  int lag = 1;
  double threshold = 0.5;  ///< acceptance threshold on the winning output
  int debounce = 5;        ///< consecutive frames before a label is emitted
  /// Fire SavePose/ReturnToSaved/Loop/Vacuum once per onset instead of every frame.
  bool edge_triggered_one_shots = false;

  /// Throws InvalidInput on widths other than 44, lag < 1, threshold outside
  /// (0, 1) or debounce < 1.
  void validate() const;
  int library_size() const { return static_cast<int>(comm.output_width()); }
  int non_gesture_count() const {
    return non_gesture ? static_cast<int>(non_gesture->output_width()) : 0;
  }
};

struct Classification {
  bool accepted = false;
  int class_index = 0;  ///< 1-based winner; 0 when rejected
  double confidence = 0.0;
  std::vector<double> outputs;
};

/// Argmax with threshold; ties go to the lowest index.
Classification classify(const mlp::Network& net, std::span<const double> feature, double threshold);

/// Same rule over an already computed output vector.
Classification classify_outputs(std::vector<double> outputs, double threshold);

struct SpotResult {
  std::int64_t t = 0;
  bool communicative = false;
  int label = 0;  ///< communicative class when `communicative`
  double confidence = 0.0;
  std::vector<double> confidences_comm;
  std::optional<std::vector<double>> confidences_non;
};

/// Runs the cascade on one feature. The non-gesture network is consulted only
/// when the communicative network accepts, and its acceptance wins.
SpotResult spot(const CascadeModel& cascade, const FeatureVector& feature, std::int64_t t = 0);

struct StepOutput {
  SpotResult result;
  bool warmup = false;  ///< the lagged frame preceded the stream start
  std::optional<int> emitted_label;
  std::optional<RobotCommand> command;
};

class SpotterState {
 public:
  explicit SpotterState(const CascadeModel& cascade);

  void reset();

  const FrameHistory& history() const noexcept { return history_; }
  int candidate() const noexcept { return candidate_; }
  int streak() const noexcept { return streak_; }
  std::optional<int> emitting() const noexcept { return emitting_; }
  std::optional<RobotCommand> last_command() const noexcept { return last_command_; }

 private:
  friend StepOutput step(SpotterState&, const CascadeModel&, const SensorFrame&);

  FrameHistory history_;
  int candidate_ = 0;
  int streak_ = 0;
  std::optional<int> emitting_;
  std::optional<RobotCommand> last_command_;
  std::optional<std::int64_t> first_t_;
};

/// Pushes the frame, spots its lag feature and applies the debouncer: a label
/// is emitted once it has been the result for `debounce` consecutive frames
/// and keeps being emitted while it persists. Throws StreamOrderError when
/// frame.t does not follow the history.
StepOutput step(SpotterState& state, const CascadeModel& cascade, const SensorFrame& frame);

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
};

/// Times `step` over `frame_count` random frames.
LatencyStats latency_probe(const CascadeModel& cascade, std::size_t frame_count, std::uint64_t seed = 0);

/// Summary statistics over raw per-frame durations (milliseconds).
LatencyStats summarize_latency(std::vector<double> samples_ms);

inline constexpr int kCascadeFormatVersion = 1;

/// {format_version, kind:"cascade", lag, threshold, debounce,
///  edge_triggered_one_shots, comm:<model>, non_gesture:<model>|null}
nlohmann::json to_document(const CascadeModel& cascade);
CascadeModel cascade_from_document(const nlohmann::json& doc);

}  // namespace glovespot
