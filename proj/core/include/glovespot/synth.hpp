#pragma once

// Deterministic synthetic glove streams: gesture templates in the unit
// 22-cube, scripted hold/transition sequences with sensor noise, and
// harvesting of transition (non-gesture) patterns.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glovespot/gesture.hpp"
#include "glovespot/stream_io.hpp"

namespace glovespot::synth {

inline constexpr double kDefaultMinSeparation = 1.5;
inline constexpr double kDefaultTightness = 0.2;

struct GestureTemplate {
  int label = 0;
  SensorArray pose{};
  std::string name;

  bool operator==(const GestureTemplate&) const = default;
};

using TemplateSet = std::vector<GestureTemplate>;

double distance(std::span<const double, kSensorCount> a, std::span<const double, kSensorCount> b);

/// Throws GenerationError when the label is missing.
const GestureTemplate& find_template(const TemplateSet& templates, int label);

/// Label of the template closest to `pose`.
int nearest_template(const TemplateSet& templates, std::span<const double, kSensorCount> pose);

/// `count` templates labelled 1..count, pairwise at least `min_separation`
/// apart, drawn by seeded rejection sampling. Throws GenerationError when the
/// attempt budget runs out.
TemplateSet make_templates(int count, std::uint64_t seed, double min_separation = kDefaultMinSeparation,
                           std::size_t max_attempts = 200000);

/// Gestures a, b, c where the straight a->b path passes close to c.
struct Triplet {
  int a = 5;
  int b = 6;
  int c = 7;
};

/// Moves template c to midpoint(a, b) + eps with |eps| = tightness and eps
/// orthogonal to b - a. Separation against templates other than a and b is
/// re-checked; a violation throws GenerationError.
TemplateSet make_confusable_triplet(TemplateSet templates, Triplet triplet,
                                    double tightness = kDefaultTightness, std::uint64_t seed = 0,
                                    double min_separation = kDefaultMinSeparation);

/// Places a and b first, c on their midpoint, then samples the remaining
/// templates around all three. Always yields a valid triplet layout.
TemplateSet make_templates_with_triplet(int count, std::uint64_t seed, Triplet triplet,
                                        double min_separation = kDefaultMinSeparation,
                                        double tightness = kDefaultTightness,
                                        std::size_t max_attempts = 200000);

nlohmann::json templates_to_json(const TemplateSet& templates);
TemplateSet templates_from_json(const nlohmann::json& doc);

struct ScriptStep {
  int label = 1;
  int hold_frames = 30;
  bool button = true;
};

struct ScenarioScript {
  std::vector<ScriptStep> steps;
  int transition_min = 10;
  int transition_max = 30;
  double noise_sigma = 0.01;
  int repetitions = 1;
  std::uint64_t seed = 0;

  /// Throws InvalidInput on non-positive holds/ranges/reps or negative sigma.
  void validate() const;
};

/// {steps:[{label, hold}], transition:[min,max], sigma, reps, seed, button:[...]}
nlohmann::json to_json(const ScenarioScript& script);
ScenarioScript script_from_json(const nlohmann::json& doc);

struct AnnotatedStream {
  std::vector<SensorFrame> frames;
  std::vector<FrameTruth> truth;

  std::vector<StreamRecord> records() const;
};

/// Holds at the template pose, linear transitions of a seeded length between
/// consecutive steps (including across repetitions), Gaussian noise clamped
/// to [0, 1]. Frames are numbered 0, 1, 2, ...
AnnotatedStream generate_stream(const ScenarioScript& script, const TemplateSet& templates);

struct TransitionSpec {
  int from = 0;
  int to = 0;
  int count = 1;  ///< non-gesture classes harvested along this transition
};

struct HarvestedSample {
  FeatureVector feature;
  int class_index = 0;  ///< 1-based non-gesture class
};

int non_gesture_class_count(std::span<const TransitionSpec> specs);

/// For each spec, takes `count` evenly spaced interior frames of every
/// matching transition segment (at most `samples_per_transition` segments per
/// spec; 0 means all) and renders lag-`lag` features. Position k of spec s
/// becomes its own class, numbered in spec order. Throws HarvestError when a
/// named transition never occurs.
std::vector<HarvestedSample> harvest_non_gestures(const AnnotatedStream& stream,
                                                  std::span<const TransitionSpec> specs,
                                                  int samples_per_transition, int lag);

/// Index within a transition segment of length `length` (0-based) picked for
/// position k of `count` evenly spaced interior samples.
std::size_t interior_offset(std::size_t length, int k, int count);

}  // namespace glovespot::synth
