#include <algorithm>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "glovespot/error.hpp"
#include "glovespot/harness.hpp"
#include "glovespot/report.hpp"

using namespace glovespot;
using namespace glovespot::harness;

namespace {

// Builds a truth axis from runs of (truth, length).
struct Axis {
  std::vector<FrameTruth> truth;
  std::vector<std::optional<int>> emitted;

  Axis& add(FrameTruth t, int n, std::optional<int> e = std::nullopt) {
    for (int i = 0; i < n; ++i) {
      truth.push_back(t);
      emitted.push_back(e);
    }
    return *this;
  }
  Axis& emit(std::size_t from, std::size_t to, std::optional<int> label) {
    for (std::size_t i = from; i < to; ++i) emitted[i] = label;
    return *this;
  }
};

// G5 hold, G5>G6 transition, G6 hold, repeated `reps` times; each hold is
// emitted correctly over its last 20 frames.
Axis clean_cycles(int reps) {
  Axis a;
  for (int r = 0; r < reps; ++r) {
    a.add(FrameTruth::hold(5), 10).add(FrameTruth::hold(5), 20, 5);
    a.add(FrameTruth::transition(5, 6), 15);
    a.add(FrameTruth::hold(6), 10).add(FrameTruth::hold(6), 20, 6);
    a.add(FrameTruth::transition(6, 5), 15);
  }
  return a;
}

ScoreResult score_axis(const Axis& a, int lib = 10) { return score(a.emitted, a.truth, lib); }

}  // namespace

TEST(Scoring, PerfectRun) {
  const ScoreResult r = score_axis(clean_cycles(4));
  EXPECT_EQ(r.per_gesture[4].instances, 4);
  EXPECT_EQ(r.per_gesture[4].recognized, 4);
  EXPECT_EQ(r.per_gesture[5].recognized, 4);
  EXPECT_DOUBLE_EQ(r.per_gesture[5].rr(), 100.0);
  EXPECT_EQ(r.per_gesture[0].instances, 0);
  ASSERT_NE(r.transition(5, 6), nullptr);
  EXPECT_EQ(r.transition(5, 6)->occurrences, 4);
  EXPECT_EQ(r.transition(5, 6)->windows_with_any_emission, 0);
  EXPECT_EQ(r.transition(3, 4), nullptr);
}

TEST(Scoring, OneWrongFrameIsOneSubstitution) {
  Axis a = clean_cycles(100);
  // Frame 60 sits inside the first G6 hold's emitting stretch.
  a.emit(60, 61, 7);
  const ScoreResult r = score_axis(a);
  const GestureTally& g6 = r.per_gesture[5];
  EXPECT_EQ(g6.instances, 100);
  EXPECT_EQ(g6.substitutions, 1);
  EXPECT_EQ(g6.recognized, 99);
  EXPECT_DOUBLE_EQ(g6.rr(), 99.0);
  EXPECT_EQ(g6.insertions, 0);
}

TEST(Scoring, SilentHoldIsDeletion) {
  Axis a;
  a.add(FrameTruth::hold(9), 30).add(FrameTruth::transition(9, 10), 12).add(FrameTruth::hold(10), 30, 10);
  const ScoreResult r = score_axis(a);
  EXPECT_EQ(r.per_gesture[8].deletions, 1);
  EXPECT_EQ(r.per_gesture[8].recognized, 0);
  EXPECT_EQ(r.per_gesture[9].recognized, 1);
}

TEST(Scoring, TransitionFalseAlarmIsChargedToTheNextHold) {
  Axis a;
  a.add(FrameTruth::hold(5), 30, 5).add(FrameTruth::transition(5, 6), 20).add(FrameTruth::hold(6), 30, 6);
  a.emit(35, 40, 7);
  ScoreResult r = score_axis(a);
  EXPECT_EQ(r.per_gesture[5].insertions, 1);
  EXPECT_EQ(r.per_gesture[5].substitutions, 1);
  EXPECT_EQ(r.per_gesture[5].recognized, 0);
  EXPECT_EQ(r.per_gesture[4].recognized, 1);
  EXPECT_EQ(r.transition(5, 6)->false_alarm_runs, 1);
  EXPECT_EQ(r.transition(5, 6)->windows_with_false_alarm, 1);

  // The previous command lingering into the window is not a false alarm.
  Axis b;
  b.add(FrameTruth::hold(5), 30, 5).add(FrameTruth::transition(5, 6), 20).add(FrameTruth::hold(6), 30, 6);
  b.emit(30, 34, 5);
  r = score_axis(b);
  EXPECT_EQ(r.per_gesture[5].recognized, 1);
  EXPECT_EQ(r.transition(5, 6)->windows_with_false_alarm, 0);
  EXPECT_EQ(r.transition(5, 6)->windows_with_any_emission, 1);
}

TEST(Scoring, ConservationAndWarmup) {
  Axis a;
  a.add(FrameTruth::warmup(), 3, 2);
  a.add(FrameTruth::hold(1), 30, 1).add(FrameTruth::transition(1, 2), 10, 3).add(FrameTruth::hold(2), 30);
  a.add(FrameTruth::transition(2, 3), 10).add(FrameTruth::hold(3), 30, 4);
  const ScoreResult r = score_axis(a, 4);
  for (const GestureTally& t : r.per_gesture) {
    EXPECT_EQ(t.recognized + t.substitutions + t.deletions, t.instances) << "G" << t.label;
  }
  // The warm-up emission of G2 does not count anywhere.
  EXPECT_EQ(r.per_gesture[1].substitutions, 1);
  EXPECT_EQ(r.per_gesture[1].insertions, 1);
  EXPECT_EQ(r.per_gesture[2].substitutions, 1);
  EXPECT_EQ(r.per_gesture[0].recognized, 1);
}

TEST(Scoring, Errors) {
  Axis a;
  a.add(FrameTruth::hold(1), 3);
  a.emitted.pop_back();
  EXPECT_THROW(score_axis(a), DimensionError);
  Axis b;
  b.add(FrameTruth::hold(12), 3);
  EXPECT_THROW(score_axis(b), InvalidInput);
}

TEST(Config, PresetsAndValidation) {
  EXPECT_EQ(ExperimentConfig::test1().lag, 1);
  EXPECT_EQ(ExperimentConfig::test2().lag, 3);
  const ExperimentConfig t3 = ExperimentConfig::test3();
  ASSERT_EQ(t3.non_gesture_specs.size(), 2u);
  EXPECT_EQ(synth::non_gesture_class_count(t3.non_gesture_specs), 3);
  EXPECT_EQ(ExperimentConfig::test4().library_size, 30);
  for (const auto& c : {ExperimentConfig::test1(), ExperimentConfig::test2(), t3, ExperimentConfig::test4()}) {
    EXPECT_NO_THROW(c.validate()) << c.name;
    EXPECT_EQ(c.epochs, 10000u);
    EXPECT_EQ(c.alpha, 0.1);
    EXPECT_EQ(c.beta, 0.1);
    EXPECT_EQ(c.hidden, 44);
  }
  ExperimentConfig bad = ExperimentConfig::test1();
  bad.library_size = 6;
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad.confusable_triplet = false;
  EXPECT_NO_THROW(bad.validate());
  bad.non_gesture_specs = {{5, 9, 1}};
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Config, JsonRoundTripAndHash) {
  const ExperimentConfig c = ExperimentConfig::test3();
  const ExperimentConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
  EXPECT_NE(config_hash(c), config_hash(ExperimentConfig::test2()));

  const ExperimentConfig partial = config_from_json({{"name", "x"}, {"lag", 2}});
  EXPECT_EQ(partial.lag, 2);
  EXPECT_EQ(partial.library_size, 10);

  try {
    config_from_json({{"lag", "three"}});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "lag");
  }
  EXPECT_THROW(config_from_json({{"lag", 0}}), ParseError);
}

TEST(Sequence, PaperOrderAndPermutation) {
  EXPECT_EQ(evaluation_sequence(ExperimentConfig::test1()), (std::vector<int>{8, 2, 3, 4, 5, 6, 7, 1, 9, 10}));
  std::vector<int> s = evaluation_sequence(ExperimentConfig::test4());
  ASSERT_EQ(s.size(), 30u);
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 30; ++i) EXPECT_EQ(s[static_cast<std::size_t>(i)], i + 1);
}

TEST(TrainingSet, Counts) {
  ExperimentConfig c = ExperimentConfig::test3();
  const synth::TemplateSet t = make_experiment_templates(c);
  const TrainingSets sets = build_training_set(t, c);
  EXPECT_EQ(sets.comm.size(), 200u);
  ASSERT_TRUE(sets.non_gesture.has_value());
  EXPECT_EQ(sets.non_gesture_classes, 3);
  EXPECT_EQ(sets.non_gesture->size(), 200u + 3u * 20u);
  std::vector<int> per_class(3, 0);
  int negatives = 0;
  for (const mlp::Sample& s : *sets.non_gesture) {
    ASSERT_EQ(s.input.size(), 44u);
    const auto hot = std::find(s.target.begin(), s.target.end(), 1.0);
    if (hot == s.target.end()) {
      ++negatives;
    } else {
      ++per_class[static_cast<std::size_t>(hot - s.target.begin())];
    }
  }
  EXPECT_EQ(negatives, 200);
  EXPECT_EQ(per_class, (std::vector<int>{20, 20, 20}));

  // The communicative set does not depend on the non-gesture specs.
  const TrainingSets plain = build_training_set(t, ExperimentConfig::test2());
  ASSERT_EQ(plain.comm.size(), sets.comm.size());
  for (std::size_t i = 0; i < plain.comm.size(); ++i) EXPECT_EQ(plain.comm[i].input, sets.comm[i].input);
  EXPECT_FALSE(plain.non_gesture.has_value());

  c.noise_sigma = 0.0;
  const TrainingSets exact = build_training_set(t, c);
  EXPECT_EQ(exact.comm[0].input, exact.comm[1].input);
  EXPECT_TRUE(std::equal(exact.comm[0].input.begin(), exact.comm[0].input.begin() + 22,
                         exact.comm[0].input.begin() + 22));
}

TEST(Report, EmptyEvaluation) {
  ExperimentConfig c = ExperimentConfig::test1();
  c.epochs = 1;
  c.eval_repetitions = 0;
  const EvalReport r = run_experiment(c);
  EXPECT_TRUE(r.per_gesture.empty());
  EXPECT_EQ(r.mean_rr, 0.0);
  EXPECT_EQ(r.total_instances(), 0);
  const std::string md = emit_report(r, ReportFormat::Markdown);
  EXPECT_NE(md.find("| Gesture |"), std::string::npos);
  EXPECT_EQ(md.find("Mean"), std::string::npos);
}

TEST(Report, JsonRoundTripAndMarkdownOrder) {
  EvalReport r;
  r.config = to_json(ExperimentConfig::test1());
  for (int g : {8, 2, 3, 4, 5, 6, 7, 1, 9, 10}) {
    r.per_gesture.push_back({"G" + std::to_string(g), 100, g == 6 ? 89 : 100, g == 6 ? 11 : 0, g == 6 ? 11 : 0, 0,
                             g == 6 ? 89.0 : 100.0});
  }
  r.mean_rr = 98.9;
  r.transitions.push_back({"G5", "G6", 100, 11, 11, 100});
  r.loop_commands = 4;
  r.timing = Timing{0.01, 0.02, 12.5};
  EXPECT_EQ(report_from_json(to_json(r)), r);
  EXPECT_EQ(r.total_instances(), 1000);
  ASSERT_NE(r.row("G6"), nullptr);
  EXPECT_EQ(r.row("G6")->recognized, 89);
  EXPECT_EQ(r.row("G11"), nullptr);
  EXPECT_TRUE(to_json(r).contains("latency"));

  const std::string md = emit_report(r, ReportFormat::Markdown);
  std::size_t prev = 0;
  for (const char* label : {"| G8 ", "| G2 ", "| G6 ", "| G1 ", "| G10 ", "| Mean "}) {
    const std::size_t at = md.find(label);
    ASSERT_NE(at, std::string::npos) << label;
    EXPECT_GT(at, prev) << label;
    prev = at;
  }
  EXPECT_NE(md.find("89.0"), std::string::npos);

  nlohmann::json broken = to_json(r);
  broken["per_gesture"][2].erase("recognized");
  try {
    report_from_json(broken);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.field().find("per_gesture"), std::string::npos);
  }
}

TEST(Report, ComparisonAndFiles) {
  EvalReport a;
  a.per_gesture = {{"G1", 10, 10, 0, 0, 0, 100.0}};
  a.mean_rr = 100.0;
  EvalReport b = a;
  b.per_gesture[0].rr = 90.0;
  b.mean_rr = 90.0;
  const EvalReport both[] = {a, b};
  const std::string names[] = {"lag 1", "lag 3"};
  const std::string table = render_comparison(both, names);
  EXPECT_NE(table.find("lag 3"), std::string::npos);
  EXPECT_NE(table.find("90.0"), std::string::npos);
  EXPECT_THROW(render_comparison(both, std::span(names, 1)), DimensionError);

  const auto dir = std::filesystem::temp_directory_path() / "glovespot_report_test";
  std::filesystem::remove_all(dir);
  write_report_files(a, dir / "nested");
  std::ifstream in(dir / "nested" / "report.json");
  EXPECT_EQ(report_from_json(nlohmann::json::parse(in)), a);
  EXPECT_TRUE(std::filesystem::exists(dir / "nested" / "report.md"));
  std::filesystem::remove_all(dir);
}

TEST(Experiment, SmallRunIsDeterministic) {
  ExperimentConfig c = ExperimentConfig::test3();
  c.epochs = 30;
  c.train_reps = 4;
  c.eval_repetitions = 3;
  const std::string a = emit_report(run_experiment(c), ReportFormat::Json);
  const std::string b = emit_report(run_experiment(c), ReportFormat::Json);
  EXPECT_EQ(a, b);
  const EvalReport r = report_from_json(nlohmann::json::parse(a));
  EXPECT_EQ(r.total_instances(), 30);
  for (const GestureRow& row : r.per_gesture) {
    EXPECT_EQ(row.recognized + row.substitutions + row.deletions, row.instances) << row.label;
  }
}
