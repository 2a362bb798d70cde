#include "glovespot/spotter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "glovespot/error.hpp"
#include "glovespot/rng.hpp"

namespace glovespot {

void CascadeModel::validate() const {
  if (comm.input_width() != kFeatureWidth) throw InvalidInput("communicative network must take 44 inputs");
  if (non_gesture && non_gesture->input_width() != kFeatureWidth) {
    throw InvalidInput("non-gesture network must take 44 inputs");
  }
  if (lag < 1) throw InvalidInput("lag must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("threshold must lie in (0, 1)");
  if (debounce < 1) throw InvalidInput("debounce must be at least 1 frame");
}

Classification classify_outputs(std::vector<double> outputs, double threshold) {
  Classification c;
  if (!outputs.empty()) {
    // max_element returns the first maximum, giving lowest-index tie-breaks.
    const auto best = std::max_element(outputs.begin(), outputs.end());
    c.confidence = *best;
    if (*best >= threshold) {
      c.accepted = true;
      c.class_index = static_cast<int>(best - outputs.begin()) + 1;
    }
  }
  c.outputs = std::move(outputs);
  return c;
}

Classification classify(const mlp::Network& net, std::span<const double> feature, double threshold) {
  return classify_outputs(mlp::infer(net, feature), threshold);
}

SpotResult spot(const CascadeModel& cascade, const FeatureVector& feature, std::int64_t t) {
  SpotResult r;
  r.t = t;
  Classification comm = classify(cascade.comm, feature.values, cascade.threshold);
  r.confidences_comm = std::move(comm.outputs);
  if (!comm.accepted) return r;
  if (cascade.non_gesture) {
    Classification non = classify(*cascade.non_gesture, feature.values, cascade.threshold);
    r.confidences_non = std::move(non.outputs);
    if (non.accepted) return r;
  }
  r.communicative = true;
  r.label = comm.class_index;
  r.confidence = comm.confidence;
  return r;
}

SpotterState::SpotterState(const CascadeModel& cascade)
    : history_(static_cast<std::size_t>(std::max(cascade.lag, 1)) + 1) {}

void SpotterState::reset() {
  history_.clear();
  candidate_ = 0;
  streak_ = 0;
  emitting_.reset();
  last_command_.reset();
  first_t_.reset();
}

StepOutput step(SpotterState& state, const CascadeModel& cascade, const SensorFrame& frame) {
  state.history_.push(frame);
  if (!state.first_t_) state.first_t_ = frame.t;

  StepOutput out;
  out.warmup = frame.t - cascade.lag < *state.first_t_;
  const FeatureVector feature = extract_feature(state.history_, frame.t, cascade.lag);
  out.result = spot(cascade, feature, frame.t);

  const std::optional<RobotCommand> previous = state.last_command_;
  if (!out.result.communicative) {
    state.candidate_ = 0;
    state.streak_ = 0;
    state.emitting_.reset();
  } else {
    const int label = out.result.label;
    if (label == state.candidate_) {
      state.streak_ = std::min(state.streak_ + 1, cascade.debounce);
    } else {
      state.candidate_ = label;
      state.streak_ = 1;
    }
    if (state.emitting_ != label) {
      state.emitting_.reset();
      if (state.streak_ >= cascade.debounce) state.emitting_ = label;
    }
  }

  std::optional<RobotCommand> command;
  if (state.emitting_) {
    out.emitted_label = state.emitting_;
    command = map_command(*state.emitting_, frame.button);
  }
  out.command = command;
  // One-shot commands repeat only when the command itself changes.
  if (cascade.edge_triggered_one_shots && command && is_one_shot(*command) && previous == command) {
    out.command.reset();
  }
  state.last_command_ = command;
  return out;
}

LatencyStats summarize_latency(std::vector<double> samples_ms) {
  LatencyStats s;
  s.count = samples_ms.size();
  if (samples_ms.empty()) return s;
  s.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(s.count);
  std::sort(samples_ms.begin(), samples_ms.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(s.count)));
  s.p99_ms = samples_ms[std::clamp<std::size_t>(rank, 1, s.count) - 1];
  s.max_ms = samples_ms.back();
  return s;
}

LatencyStats latency_probe(const CascadeModel& cascade, std::size_t frame_count, std::uint64_t seed) {
  Rng rng(seed);
  SpotterState state(cascade);
  std::vector<double> samples;
  samples.reserve(frame_count);
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < frame_count; ++i) {
    SensorFrame f;
    f.t = static_cast<std::int64_t>(i);
    f.button = (i / 64) % 2 == 0;
    for (double& x : f.sensors) x = rng.uniform();
    const auto start = clock::now();
    step(state, cascade, f);
    const auto stop = clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return summarize_latency(std::move(samples));
}

}  // namespace glovespot
