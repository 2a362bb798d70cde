#pragma once

// Desk-scale reproduction of the glove spotting experiments: training-set
// assembly, cascade training, streaming evaluation and error scoring.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glovespot/mlp.hpp"
#include "glovespot/report.hpp"
#include "glovespot/spotter.hpp"
#include "glovespot/stream_io.hpp"
#include "glovespot/synth.hpp"

namespace glovespot::harness {

/// Triplet tightness for the experiments. Calibrated so the lag-1 run loses
/// roughly one G6 in ten to G7 false alarms; below about 0.35 nearly every
/// G5->G6 transition fires G7, above about 0.42 none does.
inline constexpr double kExperimentTightness = 0.41;

struct ExperimentConfig {
  std::string name;
  int library_size = 10;
  int lag = 1;
  int train_reps = 20;
  std::size_t epochs = 10000;
  double alpha = 0.1;
  double beta = 0.1;
  int hidden = 44;
  std::vector<synth::TransitionSpec> non_gesture_specs;
  int eval_repetitions = 100;
  double noise_sigma = 0.01;
  std::uint64_t template_seed = 1;
  std::uint64_t train_seed = 2;
  std::uint64_t eval_seed = 3;
  int debounce = 5;
  double threshold = 0.5;
  bool confusable_triplet = true;
  double tightness = kExperimentTightness;
  double min_separation = synth::kDefaultMinSeparation;
  int hold_frames = 30;
  int transition_min = 10;
  int transition_max = 30;
  bool measure_timing = false;  ///< wall-clock figures make the report non-reproducible

  /// Throws InvalidInput on non-positive counts or out-of-range parameters.
  void validate() const;

  /// Ten gestures, consecutive readings.
  static ExperimentConfig test1();
  /// Ten gestures, readings three frames apart.
  static ExperimentConfig test2();
  /// As test2, plus three non-gesture classes on the G5->G6 and G6->G7 transitions.
  static ExperimentConfig test3();
  /// As test3 with thirty gestures.
  static ExperimentConfig test4();
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults. Throws ParseError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Stable 16-hex-digit digest of the canonical config document.
std::string config_hash(const ExperimentConfig& config);

/// Default templates: with the confusable triplet (G5, G6, G7) when enabled.
synth::TemplateSet make_experiment_templates(const ExperimentConfig& config);

/// G8 G2 G3 G4 G5 G6 G7 G1 G9 G10 for ten gestures, otherwise a fixed seeded
/// permutation of the whole library.
std::vector<int> evaluation_sequence(const ExperimentConfig& config);

struct TrainingSets {
  mlp::Dataset comm;
  std::optional<mlp::Dataset> non_gesture;
  int non_gesture_classes = 0;
};

/// Communicative pairs: for each gesture, train_reps features whose two halves
/// are independently noised renders of the template. Non-gesture pairs are
/// harvested from a scripted stream over the named transitions; the
/// communicative pairs join them as all-zero targets.
TrainingSets build_training_set(const synth::TemplateSet& templates, const ExperimentConfig& config);

struct TrainedCascade {
  CascadeModel cascade;
  std::vector<double> comm_loss;
  std::vector<double> non_gesture_loss;
  double train_seconds = 0.0;
};

/// Throws ExperimentError (with the epoch index) when training diverges.
TrainedCascade train_cascade(const synth::TemplateSet& templates, const ExperimentConfig& config);

/// Per-frame emitted labels and ground truth for one evaluation stream.
struct Timeline {
  std::vector<std::optional<int>> emitted;
  std::vector<std::optional<RobotCommand>> commands;
  std::vector<FrameTruth> truth;
  std::vector<double> step_ms;
};

/// Streams the evaluation sequence through the spotter. The first `lag`
/// frames are marked as warm-up.
Timeline run_timeline(const CascadeModel& cascade, const synth::TemplateSet& templates,
                      const ExperimentConfig& config);

struct GestureTally {
  int label = 0;
  int instances = 0;
  int recognized = 0;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;

  double rr() const { return instances == 0 ? 0.0 : 100.0 * recognized / instances; }
};

struct TransitionTally {
  int from = 0;
  int to = 0;
  int occurrences = 0;
  int false_alarm_runs = 0;
  int windows_with_false_alarm = 0;
  int windows_with_any_emission = 0;
};

struct ScoreResult {
  std::vector<GestureTally> per_gesture;  ///< indexed by label - 1
  std::vector<TransitionTally> transitions;  ///< sorted by (from, to)

  const TransitionTally* transition(int from, int to) const;
};

/// Scores an emission timeline against ground truth.
///
/// A run is a maximal stretch of frames emitting the same label. For every
/// hold instance of gesture g:
///  - a run overlapping the hold with label g is a detection;
///  - a run overlapping the hold with another label is wrong;
///  - a run confined to the transition leading into the hold whose label is
///    neither endpoint is a false alarm (an insertion charged to g) and also
///    counts as wrong.
/// The instance is recognized when detected and never wrong, a substitution
/// when anything wrong happened, and a deletion otherwise, so
/// recognized + substitutions + deletions == instances. Warm-up frames are
/// ignored. Throws DimensionError when the two axes differ in length.
ScoreResult score(std::span<const std::optional<int>> emitted, std::span<const FrameTruth> truth,
                  int library_size);

/// Assembles the report for one scored timeline.
EvalReport make_report(const ExperimentConfig& config, const ScoreResult& scored,
                       std::span<const int> row_order, const Timeline& timeline,
                       std::optional<double> train_seconds);

/// Evaluates an already trained cascade.
EvalReport evaluate(const CascadeModel& cascade, const synth::TemplateSet& templates,
                    const ExperimentConfig& config, std::optional<double> train_seconds = std::nullopt);

/// Templates, training, evaluation and scoring end to end.
EvalReport run_experiment(const ExperimentConfig& config);

}  // namespace glovespot::harness
