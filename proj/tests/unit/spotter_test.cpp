#include <gtest/gtest.h>

#include "glovespot/error.hpp"
#include "glovespot/rng.hpp"
#include "glovespot/spotter.hpp"
#include "stub_nets.hpp"

using namespace glovespot;

namespace {

CascadeModel beacon_cascade(int debounce, int lag = 1) {
  CascadeModel c{stub::beacon(10), std::nullopt};
  c.debounce = debounce;
  c.lag = lag;
  return c;
}

FeatureVector feature_for(int label) {
  return make_feature(stub::beacon_pose(0), stub::beacon_pose(label), 1);
}

// Emitted labels for a sequence of beacon labels.
std::vector<std::optional<int>> run(const CascadeModel& c, const std::vector<int>& labels, bool button = true) {
  SpotterState state(c);
  std::vector<std::optional<int>> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.push_back(step(state, c, stub::beacon_frame(static_cast<std::int64_t>(i), labels[i], button)).emitted_label);
  }
  return out;
}

}  // namespace

TEST(Classify, ThresholdAndTies) {
  EXPECT_FALSE(classify_outputs({0.1, 0.4, 0.3}, 0.5).accepted);
  const Classification c = classify_outputs({0.1, 0.9, 0.2}, 0.5);
  EXPECT_TRUE(c.accepted);
  EXPECT_EQ(c.class_index, 2);
  EXPECT_DOUBLE_EQ(c.confidence, 0.9);
  const Classification tie = classify_outputs({0.8, 0.8, 0.1}, 0.5);
  EXPECT_EQ(tie.class_index, 1);
  EXPECT_THROW(classify(stub::beacon(3), std::vector<double>(10, 0.0), 0.5), DimensionError);
}

TEST(Spot, CascadeCases) {
  const FeatureVector f = feature_for(6);
  CascadeModel c{stub::beacon(10), std::nullopt};

  SpotResult r = spot(c, f);
  EXPECT_TRUE(r.communicative);
  EXPECT_EQ(r.label, 6);
  EXPECT_EQ(r.confidence, *std::max_element(r.confidences_comm.begin(), r.confidences_comm.end()));
  EXPECT_EQ(r.confidences_comm.size(), 10u);

  c.non_gesture = stub::constant({0.9, 0.1, 0.1});
  r = spot(c, f);
  EXPECT_FALSE(r.communicative);
  ASSERT_TRUE(r.confidences_non.has_value());
  EXPECT_EQ(r.confidences_non->size(), 3u);

  c.non_gesture = stub::constant({0.2, 0.1, 0.3});
  r = spot(c, f);
  EXPECT_TRUE(r.communicative);
  EXPECT_EQ(r.label, 6);

  // The first network rejects: the second is never consulted.
  r = spot(c, feature_for(0));
  EXPECT_FALSE(r.communicative);
  EXPECT_FALSE(r.confidences_non.has_value());
}

TEST(Step, DebounceOne) {
  const auto out = run(beacon_cascade(1), {2, 0, 3, 3});
  EXPECT_EQ(out, (std::vector<std::optional<int>>{2, std::nullopt, 3, 3}));
}

TEST(Step, ShortRunNeverEmits) {
  const auto out = run(beacon_cascade(5), {7, 7, 6, 6, 6, 6, 6, 6});
  EXPECT_EQ(out, (std::vector<std::optional<int>>{std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                                  std::nullopt, std::nullopt, 6, 6}));
}

TEST(Step, SteadyStopEveryFrame) {
  const CascadeModel c = beacon_cascade(5);
  SpotterState state(c);
  for (int t = 0; t < 20; ++t) {
    const StepOutput o = step(state, c, stub::beacon_frame(t, 1));
    if (t < 4) {
      EXPECT_FALSE(o.command.has_value());
    } else {
      EXPECT_EQ(o.command, RobotCommand::Stop);
    }
  }
}

TEST(Step, RejectionResetsCounter) {
  const auto out = run(beacon_cascade(3), {4, 4, 0, 4, 4, 4});
  EXPECT_EQ(out, (std::vector<std::optional<int>>{std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                                  std::nullopt, 4}));
}

TEST(Step, ButtonPicksCommandAtEmission) {
  const CascadeModel c = beacon_cascade(1);
  SpotterState state(c);
  EXPECT_EQ(step(state, c, stub::beacon_frame(0, 2, true)).command, RobotCommand::XPlus);
  EXPECT_EQ(step(state, c, stub::beacon_frame(1, 2, false)).command, RobotCommand::RXPlus);
  EXPECT_EQ(step(state, c, stub::beacon_frame(2, 9, false)).command, RobotCommand::Loop);
}

TEST(Step, EdgeTriggeredOneShots) {
  CascadeModel c = beacon_cascade(1);
  c.edge_triggered_one_shots = true;
  SpotterState state(c);
  std::vector<std::optional<RobotCommand>> cmds;
  const int labels[] = {8, 8, 8, 2, 2, 8};
  for (int t = 0; t < 6; ++t) cmds.push_back(step(state, c, stub::beacon_frame(t, labels[t])).command);
  EXPECT_EQ(cmds[0], RobotCommand::SavePose);
  EXPECT_EQ(cmds[1], std::nullopt);
  EXPECT_EQ(cmds[2], std::nullopt);
  EXPECT_EQ(cmds[3], RobotCommand::XPlus);
  EXPECT_EQ(cmds[4], RobotCommand::XPlus);
  EXPECT_EQ(cmds[5], RobotCommand::SavePose);
}

TEST(Step, WarmupAndOrdering) {
  const CascadeModel c = beacon_cascade(1, 3);
  SpotterState state(c);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(step(state, c, stub::beacon_frame(t, 1)).warmup, t < 3);
  EXPECT_THROW(step(state, c, stub::beacon_frame(4, 1)), StreamOrderError);
  EXPECT_EQ(state.history().latest().t, 4);
  state.reset();
  EXPECT_TRUE(state.history().empty());
  EXPECT_NO_THROW(step(state, c, stub::beacon_frame(0, 1)));
}

TEST(Step, ReadsOnlyPastFrames) {
  // Two streams sharing a prefix produce the same outputs on that prefix.
  const CascadeModel c = beacon_cascade(2, 3);
  const std::vector<int> a{1, 1, 1, 5, 5, 5, 0, 2};
  std::vector<int> b = a;
  b.back() = 9;
  const auto ra = run(c, a);
  const auto rb = run(c, b);
  EXPECT_TRUE(std::equal(ra.begin(), ra.end() - 1, rb.begin()));
}

TEST(Step, DebounceGuaranteeFuzz) {
  const CascadeModel c = beacon_cascade(5);
  Rng rng(77);
  std::vector<int> labels(3000);
  for (int& l : labels) l = rng.uniform(0.0, 1.0) < 0.7 ? static_cast<int>(rng.uniform_int(0, 3)) : labels.front();
  const auto out = run(c, labels);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i]) continue;
    ASSERT_GE(i, 4u);
    for (std::size_t j = i - 4; j <= i; ++j) ASSERT_EQ(labels[j], *out[i]) << "frame " << i;
  }
}

TEST(Veto, AlwaysAcceptingNonGestureNetSilencesEverything) {
  CascadeModel c{stub::beacon(10), stub::constant({0.99, 0.2, 0.1})};
  c.debounce = 1;
  SpotterState state(c);
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    SensorFrame f{t, {}, rng.uniform() < 0.5};
    for (double& x : f.sensors) x = rng.uniform() < 0.2 ? 1.0 : rng.uniform();
    const StepOutput o = step(state, c, f);
    EXPECT_FALSE(o.command.has_value());
    EXPECT_FALSE(o.emitted_label.has_value());
  }
}

TEST(Cascade, ValidationAndDocumentRoundTrip) {
  CascadeModel c{stub::beacon(10), stub::constant({0.3, 0.2, 0.1})};
  c.lag = 3;
  c.threshold = 0.6;
  c.debounce = 4;
  c.edge_triggered_one_shots = true;
  const CascadeModel back = cascade_from_document(to_document(c));
  EXPECT_EQ(back.comm, c.comm);
  EXPECT_EQ(back.non_gesture, c.non_gesture);
  EXPECT_EQ(back.lag, 3);
  EXPECT_EQ(back.threshold, 0.6);
  EXPECT_EQ(back.debounce, 4);
  EXPECT_TRUE(back.edge_triggered_one_shots);
  EXPECT_EQ(back.non_gesture_count(), 3);

  nlohmann::json doc = to_document(c);
  doc["comm"]["format_version"] = 7;
  try {
    cascade_from_document(doc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "comm.format_version");
  }
  doc = to_document(c);
  doc["debounce"] = 0;
  EXPECT_THROW(cascade_from_document(doc), ParseError);

  CascadeModel bad = c;
  bad.threshold = 1.0;
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Latency, EmptyProbeAndSummary) {
  const LatencyStats empty = latency_probe(beacon_cascade(5), 0);
  EXPECT_EQ(empty.count, 0u);
  EXPECT_EQ(empty.mean_ms, 0.0);
  std::vector<double> samples(100);
  for (int i = 0; i < 100; ++i) samples[i] = i + 1;
  const LatencyStats s = summarize_latency(samples);
  EXPECT_DOUBLE_EQ(s.mean_ms, 50.5);
  EXPECT_DOUBLE_EQ(s.p99_ms, 99.0);
  EXPECT_DOUBLE_EQ(s.max_ms, 100.0);
}
