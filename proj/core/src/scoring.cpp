#include <algorithm>
#include <map>
#include <string>

#include "glovespot/error.hpp"
#include "glovespot/harness.hpp"

namespace glovespot::harness {

namespace {

struct Segment {
  FrameTruth truth;
  std::size_t start = 0;
  std::size_t end = 0;  // one past the last frame
};

bool is_endpoint(const FrameTruth& tr, int label) { return label == tr.from || label == tr.to; }

}  // namespace

const TransitionTally* ScoreResult::transition(int from, int to) const {
  for (const TransitionTally& t : transitions) {
    if (t.from == from && t.to == to) return &t;
  }
  return nullptr;
}

ScoreResult score(std::span<const std::optional<int>> emitted, std::span<const FrameTruth> truth,
                  int library_size) {
  if (emitted.size() != truth.size()) {
    throw DimensionError("timeline has " + std::to_string(emitted.size()) + " frames, truth has " +
                         std::to_string(truth.size()));
  }
  if (library_size < 1) throw InvalidInput("library size must be positive");

  // Split the truth axis into hold and transition segments; warm-up frames
  // belong to none.
  std::vector<Segment> segments;
  std::vector<int> segment_of(truth.size(), -1);
  for (std::size_t i = 0; i < truth.size();) {
    if (truth[i].kind == FrameTruth::Kind::Warmup) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < truth.size() && truth[j] == truth[i]) {
      segment_of[j] = static_cast<int>(segments.size());
      ++j;
    }
    segments.push_back({truth[i], i, j});
    i = j;
  }

  const std::size_t n_seg = segments.size();
  std::vector<bool> detected(n_seg, false);
  std::vector<bool> wrong(n_seg, false);
  std::vector<int> charged(n_seg, 0);

  // Holds that follow each transition segment.
  auto following_hold = [&](std::size_t s) -> std::optional<std::size_t> {
    if (s + 1 < n_seg && segments[s + 1].truth.kind == FrameTruth::Kind::Hold &&
        segments[s + 1].start == segments[s].end) {
      return s + 1;
    }
    return std::nullopt;
  };

  std::map<std::pair<int, int>, TransitionTally> transitions;
  for (std::size_t s = 0; s < n_seg; ++s) {
    const FrameTruth& tr = segments[s].truth;
    if (tr.kind != FrameTruth::Kind::Transition) continue;
    TransitionTally& tally = transitions[{tr.from, tr.to}];
    tally.from = tr.from;
    tally.to = tr.to;
    ++tally.occurrences;
    bool any = false;
    bool false_alarm = false;
    for (std::size_t f = segments[s].start; f < segments[s].end; ++f) {
      if (!emitted[f]) continue;
      any = true;
      false_alarm = false_alarm || !is_endpoint(tr, *emitted[f]);
    }
    tally.windows_with_any_emission += any ? 1 : 0;
    tally.windows_with_false_alarm += false_alarm ? 1 : 0;
  }

  // Walk emission runs.
  for (std::size_t i = 0; i < emitted.size();) {
    if (!emitted[i] || segment_of[i] < 0) {
      ++i;
      continue;
    }
    const int label = *emitted[i];
    std::size_t j = i;
    while (j < emitted.size() && emitted[j] == label && segment_of[j] >= 0) ++j;

    bool touched_hold = false;
    for (std::size_t f = i; f < j; ++f) {
      const auto s = static_cast<std::size_t>(segment_of[f]);
      if (segments[s].truth.kind != FrameTruth::Kind::Hold) continue;
      touched_hold = true;
      if (segments[s].truth.label == label) {
        detected[s] = true;
      } else {
        wrong[s] = true;
      }
    }
    if (!touched_hold) {
      const auto s = static_cast<std::size_t>(segment_of[i]);
      const FrameTruth& tr = segments[s].truth;
      if (!is_endpoint(tr, label)) {
        ++transitions[{tr.from, tr.to}].false_alarm_runs;
        if (auto h = following_hold(s)) ++charged[*h];
      }
    }
    i = j;
  }

  ScoreResult result;
  result.per_gesture.resize(static_cast<std::size_t>(library_size));
  for (int g = 1; g <= library_size; ++g) result.per_gesture[static_cast<std::size_t>(g - 1)].label = g;
  for (std::size_t s = 0; s < n_seg; ++s) {
    const FrameTruth& tr = segments[s].truth;
    if (tr.kind != FrameTruth::Kind::Hold) continue;
    if (tr.label < 1 || tr.label > library_size) {
      throw InvalidInput("truth label G" + std::to_string(tr.label) + " outside the library");
    }
    GestureTally& tally = result.per_gesture[static_cast<std::size_t>(tr.label - 1)];
    ++tally.instances;
    tally.insertions += charged[s];
    const bool any_wrong = wrong[s] || charged[s] > 0;
    if (detected[s] && !any_wrong) {
      ++tally.recognized;
    } else if (any_wrong) {
      ++tally.substitutions;
    } else {
      ++tally.deletions;
    }
  }
  for (auto& [key, tally] : transitions) result.transitions.push_back(tally);
  return result;
}

}  // namespace glovespot::harness
