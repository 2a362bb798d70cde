#include "glovespot/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "glovespot/error.hpp"
#include "glovespot/rng.hpp"

namespace glovespot::harness {

using nlohmann::json;

namespace {

constexpr synth::Triplet kTriplet{5, 6, 7};

SensorArray noisy(const SensorArray& pose, double sigma, Rng& rng) {
  SensorArray out = pose;
  if (sigma > 0.0) {
    for (double& x : out) x = std::clamp(x + sigma * rng.normal(), 0.0, 1.0);
  }
  return out;
}

std::vector<double> to_input(const FeatureVector& f) { return {f.values.begin(), f.values.end()}; }

// Steps that walk through every named transition, e.g. G5 G6 G7 for
// (G5,G6),(G6,G7).
std::vector<synth::ScriptStep> transition_walk(std::span<const synth::TransitionSpec> specs, int hold_frames) {
  std::vector<synth::ScriptStep> steps;
  for (const synth::TransitionSpec& s : specs) {
    if (steps.empty() || steps.back().label != s.from) steps.push_back({s.from, hold_frames, true});
    steps.push_back({s.to, hold_frames, true});
  }
  return steps;
}

json spec_json(const synth::TransitionSpec& s) {
  return {{"from", GestureLabel::communicative(s.from).to_string()},
          {"to", GestureLabel::communicative(s.to).to_string()},
          {"count", s.count}};
}

int parse_gesture(const json& j, const std::string& field) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_string()) {
    GestureLabel l = GestureLabel::parse(j.get<std::string>());
    if (l.kind == GestureLabel::Kind::Communicative) return l.index;
  }
  throw ParseError(field, "expected a gesture label such as \"G5\"");
}

// Seeds for the two networks, independent of whether the second one exists.
struct NetworkSeeds {
  std::uint64_t comm_init, comm_shuffle, non_init, non_shuffle;
};

NetworkSeeds network_seeds(std::uint64_t train_seed) {
  Rng rng(train_seed ^ 0x5eed5eed5eed5eedULL);
  NetworkSeeds s{};
  s.comm_init = rng.fork_seed();
  s.comm_shuffle = rng.fork_seed();
  s.non_init = rng.fork_seed();
  s.non_shuffle = rng.fork_seed();
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (library_size < 1) throw InvalidInput("library_size must be positive");
  if (lag < 1) throw InvalidInput("lag must be at least 1");
  if (train_reps < 1) throw InvalidInput("train_reps must be positive");
  if (epochs < 1) throw InvalidInput("epochs must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw InvalidInput("alpha and beta must lie in [0, 1]");
  }
  if (hidden < 1) throw InvalidInput("hidden must be positive");
  if (eval_repetitions < 0) throw InvalidInput("eval_repetitions must be non-negative");
  if (!(noise_sigma >= 0.0)) throw InvalidInput("noise sigma must be non-negative");
  if (debounce < 1) throw InvalidInput("debounce must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("threshold must lie in (0, 1)");
  if (hold_frames < 1) throw InvalidInput("hold_frames must be positive");
  if (transition_min < 1 || transition_max < transition_min) throw InvalidInput("bad transition range");
  if (confusable_triplet && library_size < 7) {
    throw InvalidInput("the confusable triplet needs at least seven gestures");
  }
  for (const synth::TransitionSpec& s : non_gesture_specs) {
    if (s.from < 1 || s.from > library_size || s.to < 1 || s.to > library_size || s.count < 1) {
      throw InvalidInput("non-gesture spec outside the library");
    }
  }
}

ExperimentConfig ExperimentConfig::test1() {
  ExperimentConfig c;
  c.name = "test1";
  return c;
}

ExperimentConfig ExperimentConfig::test2() {
  ExperimentConfig c;
  c.name = "test2";
  c.lag = 3;
  return c;
}

ExperimentConfig ExperimentConfig::test3() {
  ExperimentConfig c = test2();
  c.name = "test3";
  c.non_gesture_specs = {{5, 6, 2}, {6, 7, 1}};
  return c;
}

ExperimentConfig ExperimentConfig::test4() {
  ExperimentConfig c = test3();
  c.name = "test4";
  c.library_size = 30;
  return c;
}

json to_json(const ExperimentConfig& c) {
  json specs = json::array();
  for (const auto& s : c.non_gesture_specs) specs.push_back(spec_json(s));
  return json{{"name", c.name},
              {"library_size", c.library_size},
              {"lag", c.lag},
              {"train_reps", c.train_reps},
              {"epochs", c.epochs},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"hidden", c.hidden},
              {"non_gesture_specs", std::move(specs)},
              {"eval_repetitions", c.eval_repetitions},
              {"sigma", c.noise_sigma},
              {"seeds", {{"template", c.template_seed}, {"train", c.train_seed}, {"eval", c.eval_seed}}},
              {"debounce", c.debounce},
              {"threshold", c.threshold},
              {"confusable_triplet", c.confusable_triplet},
              {"tightness", c.tightness},
              {"min_separation", c.min_separation},
              {"hold_frames", c.hold_frames},
              {"transition", {c.transition_min, c.transition_max}},
              {"timing", c.measure_timing}};
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "experiment config must be a JSON object");
  ExperimentConfig c;
  auto get = [&](const char* key, auto& target) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    try {
      target = it->get<std::decay_t<decltype(target)>>();
    } catch (const json::exception&) {
      throw ParseError(key, "wrong type");
    }
  };
  get("name", c.name);
  get("library_size", c.library_size);
  get("lag", c.lag);
  get("train_reps", c.train_reps);
  get("epochs", c.epochs);
  get("alpha", c.alpha);
  get("beta", c.beta);
  get("hidden", c.hidden);
  get("eval_repetitions", c.eval_repetitions);
  get("sigma", c.noise_sigma);
  get("debounce", c.debounce);
  get("threshold", c.threshold);
  get("confusable_triplet", c.confusable_triplet);
  get("tightness", c.tightness);
  get("min_separation", c.min_separation);
  get("hold_frames", c.hold_frames);
  get("timing", c.measure_timing);
  if (auto it = doc.find("non_gesture_specs"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("non_gesture_specs", "expected an array");
    for (const json& s : *it) {
      if (!s.is_object() || !s.contains("from") || !s.contains("to")) {
        throw ParseError("non_gesture_specs", "each spec needs from and to");
      }
      c.non_gesture_specs.push_back({parse_gesture(s["from"], "non_gesture_specs.from"),
                                     parse_gesture(s["to"], "non_gesture_specs.to"), s.value("count", 1)});
    }
  }
  if (auto it = doc.find("seeds"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("seeds", "expected an object");
    try {
      c.template_seed = it->value("template", c.template_seed);
      c.train_seed = it->value("train", c.train_seed);
      c.eval_seed = it->value("eval", c.eval_seed);
    } catch (const json::exception&) {
      throw ParseError("seeds", "seeds must be non-negative integers");
    }
  }
  if (auto it = doc.find("transition"); it != doc.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
      throw ParseError("transition", "expected [min, max]");
    }
    c.transition_min = (*it)[0].get<int>();
    c.transition_max = (*it)[1].get<int>();
  }
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ParseError("config", e.what());
  }
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical (sorted-key) dump.
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

synth::TemplateSet make_experiment_templates(const ExperimentConfig& config) {
  config.validate();
  if (config.confusable_triplet) {
    return synth::make_templates_with_triplet(config.library_size, config.template_seed, kTriplet,
                                              config.min_separation, config.tightness);
  }
  return synth::make_templates(config.library_size, config.template_seed, config.min_separation);
}

std::vector<int> evaluation_sequence(const ExperimentConfig& config) {
  if (config.library_size == 10) return {8, 2, 3, 4, 5, 6, 7, 1, 9, 10};
  std::vector<int> seq(static_cast<std::size_t>(config.library_size));
  std::iota(seq.begin(), seq.end(), 1);
  Rng rng(config.template_seed ^ 0x0de1e7e5eULL);
  rng.shuffle(std::span<int>(seq));
  return seq;
}

TrainingSets build_training_set(const synth::TemplateSet& templates, const ExperimentConfig& config) {
  config.validate();
  Rng rng(config.train_seed);
  TrainingSets sets;
  for (int g = 1; g <= config.library_size; ++g) {
    const SensorArray& pose = synth::find_template(templates, g).pose;
    std::vector<double> target = one_hot(g, config.library_size);
    for (int rep = 0; rep < config.train_reps; ++rep) {
      const SensorArray earlier = noisy(pose, config.noise_sigma, rng);
      const SensorArray later = noisy(pose, config.noise_sigma, rng);
      sets.comm.push_back({to_input(make_feature(earlier, later, config.lag)), target});
    }
  }
  if (config.non_gesture_specs.empty()) return sets;

  synth::ScenarioScript script;
  script.steps = transition_walk(config.non_gesture_specs, config.hold_frames);
  script.transition_min = config.transition_min;
  script.transition_max = config.transition_max;
  script.noise_sigma = config.noise_sigma;
  script.repetitions = config.train_reps;
  script.seed = rng.fork_seed();
  const synth::AnnotatedStream stream = synth::generate_stream(script, templates);

  const int classes = synth::non_gesture_class_count(config.non_gesture_specs);
  const auto harvested =
      synth::harvest_non_gestures(stream, config.non_gesture_specs, config.train_reps, config.lag);
  mlp::Dataset non;
  for (const synth::HarvestedSample& s : harvested) {
    non.push_back({to_input(s.feature), one_hot(s.class_index, classes)});
  }
  // Communicative poses are the explicit negatives of the non-gesture network.
  for (const mlp::Sample& s : sets.comm) {
    non.push_back({s.input, std::vector<double>(static_cast<std::size_t>(classes), 0.0)});
  }
  sets.non_gesture = std::move(non);
  sets.non_gesture_classes = classes;
  return sets;
}

TrainedCascade train_cascade(const synth::TemplateSet& templates, const ExperimentConfig& config) {
  const TrainingSets sets = build_training_set(templates, config);
  const NetworkSeeds seeds = network_seeds(config.train_seed);
  const auto hidden = static_cast<std::size_t>(config.hidden);

  auto fit = [&](const mlp::Dataset& data, std::size_t outputs, std::uint64_t init_seed,
                 std::uint64_t shuffle_seed, std::vector<double>& history) {
    const std::size_t sizes[] = {kFeatureWidth, hidden, outputs};
    mlp::Network net = mlp::init_network(sizes, init_seed);
    mlp::TrainConfig tc;
    tc.alpha = config.alpha;
    tc.beta = config.beta;
    tc.epochs = config.epochs;
    tc.seed = shuffle_seed;
    try {
      history = mlp::train(net, data, tc).loss_history;
    } catch (const TrainingDiverged& e) {
      throw ExperimentError("training diverged at epoch " + std::to_string(e.epoch()));
    }
    return net;
  };

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> comm_loss;
  mlp::Network comm = fit(sets.comm, static_cast<std::size_t>(config.library_size), seeds.comm_init,
                          seeds.comm_shuffle, comm_loss);
  TrainedCascade out{CascadeModel{std::move(comm), std::nullopt}, std::move(comm_loss), {}, 0.0};
  if (sets.non_gesture) {
    out.cascade.non_gesture = fit(*sets.non_gesture, static_cast<std::size_t>(sets.non_gesture_classes),
                                  seeds.non_init, seeds.non_shuffle, out.non_gesture_loss);
  }
  out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.cascade.lag = config.lag;
  out.cascade.threshold = config.threshold;
  out.cascade.debounce = config.debounce;
  out.cascade.validate();
  return out;
}

Timeline run_timeline(const CascadeModel& cascade, const synth::TemplateSet& templates,
                      const ExperimentConfig& config) {
  Timeline tl;
  if (config.eval_repetitions == 0) return tl;
  synth::ScenarioScript script;
  for (int g : evaluation_sequence(config)) script.steps.push_back({g, config.hold_frames, true});
  script.transition_min = config.transition_min;
  script.transition_max = config.transition_max;
  script.noise_sigma = config.noise_sigma;
  script.repetitions = config.eval_repetitions;
  script.seed = config.eval_seed;
  const synth::AnnotatedStream stream = synth::generate_stream(script, templates);

  tl.truth = stream.truth;
  for (std::size_t i = 0; i < tl.truth.size() && i < static_cast<std::size_t>(cascade.lag); ++i) {
    tl.truth[i] = FrameTruth::warmup();
  }
  tl.emitted.reserve(stream.frames.size());
  tl.commands.reserve(stream.frames.size());
  SpotterState state(cascade);
  using clock = std::chrono::steady_clock;
  for (const SensorFrame& f : stream.frames) {
    const auto start = clock::now();
    StepOutput out = step(state, cascade, f);
    if (config.measure_timing) {
      tl.step_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - start).count());
    }
    tl.emitted.push_back(out.emitted_label);
    tl.commands.push_back(out.command);
  }
  return tl;
}

EvalReport make_report(const ExperimentConfig& config, const ScoreResult& scored, std::span<const int> row_order,
                       const Timeline& timeline, std::optional<double> train_seconds) {
  EvalReport r;
  r.config = to_json(config);
  std::vector<int> seen;
  double rr_sum = 0.0;
  for (int g : row_order) {
    if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
    seen.push_back(g);
    const GestureTally& t = scored.per_gesture.at(static_cast<std::size_t>(g - 1));
    if (t.instances == 0) continue;
    r.per_gesture.push_back({GestureLabel::communicative(g).to_string(), t.instances, t.recognized,
                             t.substitutions, t.insertions, t.deletions, t.rr()});
    rr_sum += t.rr();
  }
  if (!r.per_gesture.empty()) r.mean_rr = rr_sum / static_cast<double>(r.per_gesture.size());
  for (const TransitionTally& t : scored.transitions) {
    r.transitions.push_back({GestureLabel::communicative(t.from).to_string(),
                             GestureLabel::communicative(t.to).to_string(), t.occurrences, t.false_alarm_runs,
                             t.windows_with_false_alarm, t.windows_with_any_emission});
  }
  r.loop_commands = static_cast<int>(std::count(timeline.commands.begin(), timeline.commands.end(),
                                                std::optional<RobotCommand>(RobotCommand::Loop)));
  if (config.measure_timing) {
    const LatencyStats lat = summarize_latency(timeline.step_ms);
    r.timing = Timing{lat.mean_ms, lat.p99_ms, train_seconds.value_or(0.0)};
  }
  return r;
}

EvalReport evaluate(const CascadeModel& cascade, const synth::TemplateSet& templates,
                    const ExperimentConfig& config, std::optional<double> train_seconds) {
  config.validate();
  const Timeline tl = run_timeline(cascade, templates, config);
  const ScoreResult scored = score(tl.emitted, tl.truth, config.library_size);
  const std::vector<int> order = evaluation_sequence(config);
  return make_report(config, scored, order, tl, train_seconds);
}

EvalReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const synth::TemplateSet templates = make_experiment_templates(config);
  const TrainedCascade trained = train_cascade(templates, config);
  return evaluate(trained.cascade, templates, config, trained.train_seconds);
}

}  // namespace glovespot::harness
