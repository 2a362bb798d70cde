#include "glovespot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glovespot/error.hpp"
#include "glovespot/rng.hpp"

namespace glovespot::synth {

using nlohmann::json;

namespace {

SensorArray random_pose(Rng& rng) {
  SensorArray p{};
  for (double& x : p) x = rng.uniform();
  return p;
}

bool separated(const SensorArray& pose, const TemplateSet& placed, double min_separation) {
  return std::all_of(placed.begin(), placed.end(), [&](const GestureTemplate& t) {
    return distance(pose, t.pose) >= min_separation;
  });
}

std::string default_name(int label) { return "Gesture " + std::to_string(label); }

// Unit vector orthogonal to `axis` (or any unit vector when axis is zero).
SensorArray orthogonal_direction(Rng& rng, const SensorArray& axis) {
  double axis_norm2 = 0.0;
  for (double v : axis) axis_norm2 += v * v;
  for (;;) {
    SensorArray g{};
    for (double& x : g) x = rng.normal();
    if (axis_norm2 > 0.0) {
      double dot = 0.0;
      for (std::size_t i = 0; i < kSensorCount; ++i) dot += g[i] * axis[i];
      for (std::size_t i = 0; i < kSensorCount; ++i) g[i] -= dot / axis_norm2 * axis[i];
    }
    double n = 0.0;
    for (double v : g) n += v * v;
    n = std::sqrt(n);
    if (n > 1e-9) {
      for (double& x : g) x /= n;
      return g;
    }
  }
}

SensorArray confusable_pose(Rng& rng, const SensorArray& a, const SensorArray& b, double tightness) {
  SensorArray mid{};
  SensorArray axis{};
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    mid[i] = 0.5 * (a[i] + b[i]);
    axis[i] = b[i] - a[i];
  }
  if (tightness <= 0.0) return mid;
  SensorArray best{};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const SensorArray dir = orthogonal_direction(rng, axis);
    bool inside = true;
    for (std::size_t i = 0; i < kSensorCount; ++i) {
      best[i] = mid[i] + tightness * dir[i];
      inside = inside && best[i] >= 0.0 && best[i] <= 1.0;
    }
    if (inside) return best;
  }
  // Midpoint hugs a face of the cube: clamp, which only shortens eps.
  for (double& x : best) x = std::clamp(x, 0.0, 1.0);
  return best;
}

void check_count(int count) {
  if (count < 1) throw InvalidInput("template count must be positive");
}

}  // namespace

double distance(std::span<const double, kSensorCount> a, std::span<const double, kSensorCount> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

const GestureTemplate& find_template(const TemplateSet& templates, int label) {
  auto it = std::find_if(templates.begin(), templates.end(),
                         [label](const GestureTemplate& t) { return t.label == label; });
  if (it == templates.end()) throw GenerationError("no template for gesture G" + std::to_string(label));
  return *it;
}

int nearest_template(const TemplateSet& templates, std::span<const double, kSensorCount> pose) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const GestureTemplate& t : templates) {
    const double d = distance(pose, t.pose);
    if (d < best_d) {
      best_d = d;
      best = t.label;
    }
  }
  return best;
}

TemplateSet make_templates(int count, std::uint64_t seed, double min_separation, std::size_t max_attempts) {
  check_count(count);
  if (!(min_separation > 0.0)) throw InvalidInput("min_separation must be positive");
  Rng rng(seed);
  TemplateSet out;
  std::size_t attempts = 0;
  for (int label = 1; label <= count; ++label) {
    for (;;) {
      if (++attempts > max_attempts) {
        throw GenerationError("could not place " + std::to_string(count) + " templates " +
                              std::to_string(min_separation) + " apart; try a smaller min_separation");
      }
      SensorArray pose = random_pose(rng);
      if (separated(pose, out, min_separation)) {
        out.push_back({label, pose, default_name(label)});
        break;
      }
    }
  }
  return out;
}

TemplateSet make_confusable_triplet(TemplateSet templates, Triplet triplet, double tightness,
                                    std::uint64_t seed, double min_separation) {
  if (triplet.a == triplet.b || triplet.a == triplet.c || triplet.b == triplet.c) {
    throw InvalidInput("confusable triplet needs three distinct gestures");
  }
  if (tightness < 0.0) throw InvalidInput("tightness must be non-negative");
  const SensorArray a = find_template(templates, triplet.a).pose;
  const SensorArray b = find_template(templates, triplet.b).pose;
  find_template(templates, triplet.c);

  Rng rng(seed);
  const SensorArray pose = confusable_pose(rng, a, b, tightness);
  for (const GestureTemplate& t : templates) {
    if (t.label == triplet.a || t.label == triplet.b || t.label == triplet.c) continue;
    if (distance(pose, t.pose) < min_separation) {
      throw GenerationError("relocating G" + std::to_string(triplet.c) + " brings it within " +
                            std::to_string(min_separation) + " of G" + std::to_string(t.label));
    }
  }
  for (GestureTemplate& t : templates) {
    if (t.label == triplet.c) t.pose = pose;
  }
  return templates;
}

TemplateSet make_templates_with_triplet(int count, std::uint64_t seed, Triplet triplet,
                                        double min_separation, double tightness,
                                        std::size_t max_attempts) {
  check_count(count);
  for (int g : {triplet.a, triplet.b, triplet.c}) {
    if (g < 1 || g > count) throw InvalidInput("triplet gesture outside the library");
  }
  if (triplet.a == triplet.b || triplet.a == triplet.c || triplet.b == triplet.c) {
    throw InvalidInput("confusable triplet needs three distinct gestures");
  }
  Rng rng(seed);
  TemplateSet placed;
  std::size_t attempts = 0;
  auto place = [&](int label) {
    for (;;) {
      if (++attempts > max_attempts) {
        throw GenerationError("could not place " + std::to_string(count) +
                              " templates; try a smaller min_separation");
      }
      SensorArray pose = random_pose(rng);
      if (separated(pose, placed, min_separation)) {
        placed.push_back({label, pose, default_name(label)});
        return;
      }
    }
  };
  place(triplet.a);
  place(triplet.b);
  const SensorArray c = confusable_pose(rng, placed[0].pose, placed[1].pose, tightness);
  placed.push_back({triplet.c, c, default_name(triplet.c)});
  for (int label = 1; label <= count; ++label) {
    if (label != triplet.a && label != triplet.b && label != triplet.c) place(label);
  }
  std::sort(placed.begin(), placed.end(),
            [](const GestureTemplate& x, const GestureTemplate& y) { return x.label < y.label; });
  return placed;
}

json templates_to_json(const TemplateSet& templates) {
  json list = json::array();
  for (const GestureTemplate& t : templates) {
    list.push_back({{"label", GestureLabel::communicative(t.label).to_string()},
                    {"name", t.name},
                    {"pose", t.pose}});
  }
  return json{{"format_version", 1}, {"templates", std::move(list)}};
}

TemplateSet templates_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array()) {
    throw ParseError("templates", "expected an array of templates");
  }
  TemplateSet out;
  for (const json& t : doc["templates"]) {
    GestureTemplate g;
    if (!t.contains("label") || !t["label"].is_string()) throw ParseError("templates.label", "expected a string");
    GestureLabel label = GestureLabel::parse(t["label"].get<std::string>());
    if (label.kind != GestureLabel::Kind::Communicative) {
      throw ParseError("templates.label", "templates must be communicative gestures");
    }
    g.label = label.index;
    g.name = t.value("name", default_name(g.label));
    if (!t.contains("pose") || !t["pose"].is_array() || t["pose"].size() != kSensorCount) {
      throw ParseError("templates.pose", "expected 22 numbers");
    }
    for (std::size_t i = 0; i < kSensorCount; ++i) {
      const json& v = t["pose"][i];
      if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) {
        throw ParseError("templates.pose", "values must be numbers in [0, 1]");
      }
      g.pose[i] = v.get<double>();
    }
    out.push_back(std::move(g));
  }
  return out;
}

void ScenarioScript::validate() const {
  if (steps.empty()) throw InvalidInput("scenario has no steps");
  for (const ScriptStep& s : steps) {
    if (s.hold_frames < 1) throw InvalidInput("hold_frames must be at least 1");
  }
  if (transition_min < 1 || transition_max < transition_min) {
    throw InvalidInput("transition range must be positive with min <= max");
  }
  if (!(noise_sigma >= 0.0)) throw InvalidInput("noise sigma must be non-negative");
  if (repetitions < 0) throw InvalidInput("repetitions must be non-negative");
}

json to_json(const ScenarioScript& script) {
  json steps = json::array();
  json buttons = json::array();
  for (const ScriptStep& s : script.steps) {
    steps.push_back({{"label", GestureLabel::communicative(s.label).to_string()}, {"hold", s.hold_frames}});
    buttons.push_back(s.button);
  }
  return json{{"steps", std::move(steps)},
              {"transition", {script.transition_min, script.transition_max}},
              {"sigma", script.noise_sigma},
              {"reps", script.repetitions},
              {"seed", script.seed},
              {"button", std::move(buttons)}};
}

ScenarioScript script_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "scenario must be a JSON object");
  ScenarioScript s;
  if (!doc.contains("steps") || !doc["steps"].is_array()) throw ParseError("steps", "expected an array");
  for (const json& st : doc["steps"]) {
    ScriptStep step;
    if (!st.is_object() || !st.contains("label")) throw ParseError("steps.label", "missing label");
    const json& label = st["label"];
    if (label.is_number_integer()) {
      step.label = label.get<int>();
    } else if (label.is_string()) {
      step.label = GestureLabel::parse(label.get<std::string>()).index;
    } else {
      throw ParseError("steps.label", "expected \"G<n>\" or an integer");
    }
    step.hold_frames = st.value("hold", 30);
    s.steps.push_back(step);
  }
  try {
    if (doc.contains("transition")) {
      const json& tr = doc["transition"];
      if (!tr.is_array() || tr.size() != 2) throw ParseError("transition", "expected [min, max]");
      s.transition_min = tr[0].get<int>();
      s.transition_max = tr[1].get<int>();
    }
    s.noise_sigma = doc.value("sigma", s.noise_sigma);
    s.repetitions = doc.value("reps", s.repetitions);
    s.seed = doc.value("seed", s.seed);
    if (doc.contains("button")) {
      const json& b = doc["button"];
      if (!b.is_array() || b.size() != s.steps.size()) {
        throw ParseError("button", "expected one boolean per step");
      }
      for (std::size_t i = 0; i < b.size(); ++i) s.steps[i].button = b[i].get<bool>();
    }
  } catch (const json::exception& e) {
    throw ParseError("scenario", e.what());
  }
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw ParseError("scenario", e.what());
  }
  return s;
}

std::vector<StreamRecord> AnnotatedStream::records() const {
  std::vector<StreamRecord> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) out.push_back({frames[i], truth[i]});
  return out;
}

AnnotatedStream generate_stream(const ScenarioScript& script, const TemplateSet& templates) {
  script.validate();
  for (const ScriptStep& s : script.steps) find_template(templates, s.label);

  Rng rng(script.seed);
  AnnotatedStream out;
  std::int64_t t = 0;
  auto emit = [&](const SensorArray& pose, FrameTruth truth, bool button) {
    SensorFrame f;
    f.t = t++;
    f.button = button;
    f.sensors = pose;
    if (script.noise_sigma > 0.0) {
      for (double& x : f.sensors) x = std::clamp(x + script.noise_sigma * rng.normal(), 0.0, 1.0);
    }
    out.frames.push_back(f);
    out.truth.push_back(truth);
  };

  const GestureTemplate* prev = nullptr;
  for (int rep = 0; rep < script.repetitions; ++rep) {
    for (const ScriptStep& step : script.steps) {
      const GestureTemplate& cur = find_template(templates, step.label);
      if (prev != nullptr) {
        const auto frames = rng.uniform_int(script.transition_min, script.transition_max);
        for (std::int64_t j = 1; j <= frames; ++j) {
          const double s = static_cast<double>(j) / static_cast<double>(frames + 1);
          SensorArray pose{};
          for (std::size_t i = 0; i < kSensorCount; ++i) {
            pose[i] = prev->pose[i] + (cur.pose[i] - prev->pose[i]) * s;
          }
          emit(pose, FrameTruth::transition(prev->label, cur.label), step.button);
        }
      }
      for (int h = 0; h < step.hold_frames; ++h) emit(cur.pose, FrameTruth::hold(cur.label), step.button);
      prev = &cur;
    }
  }
  return out;
}

int non_gesture_class_count(std::span<const TransitionSpec> specs) {
  int n = 0;
  for (const TransitionSpec& s : specs) n += s.count;
  return n;
}

std::size_t interior_offset(std::size_t length, int k, int count) {
  const auto j = (static_cast<std::size_t>(k) * (length + 1)) / static_cast<std::size_t>(count + 1);
  return std::clamp<std::size_t>(j, 1, length) - 1;
}

std::vector<HarvestedSample> harvest_non_gestures(const AnnotatedStream& stream,
                                                  std::span<const TransitionSpec> specs,
                                                  int samples_per_transition, int lag) {
  if (lag < 1) throw InvalidInput("lag must be at least 1");
  struct Segment {
    std::size_t start;
    std::size_t length;
    int from;
    int to;
  };
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < stream.truth.size();) {
    const FrameTruth& tr = stream.truth[i];
    if (tr.kind != FrameTruth::Kind::Transition) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < stream.truth.size() && stream.truth[j] == tr) ++j;
    segments.push_back({i, j - i, tr.from, tr.to});
    i = j;
  }

  std::vector<HarvestedSample> out;
  int class_base = 0;
  for (const TransitionSpec& spec : specs) {
    if (spec.count < 1) throw InvalidInput("non-gesture count must be positive");
    int used = 0;
    for (const Segment& seg : segments) {
      if (seg.from != spec.from || seg.to != spec.to) continue;
      if (samples_per_transition > 0 && used >= samples_per_transition) break;
      ++used;
      for (int k = 1; k <= spec.count; ++k) {
        const std::size_t idx = seg.start + interior_offset(seg.length, k, spec.count);
        const std::size_t earlier = idx >= static_cast<std::size_t>(lag) ? idx - static_cast<std::size_t>(lag) : 0;
        out.push_back({make_feature(stream.frames[earlier].sensors, stream.frames[idx].sensors, lag),
                       class_base + k});
      }
    }
    if (used == 0) {
      throw HarvestError("transition G" + std::to_string(spec.from) + " -> G" + std::to_string(spec.to) +
                         " does not occur in the stream");
    }
    class_base += spec.count;
  }
  return out;
}

}  // namespace glovespot::synth
