#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "glovespot/error.hpp"
#include "glovespot/gesture.hpp"
#include "glovespot/stream_io.hpp"

using namespace glovespot;

namespace {

SensorFrame frame_at(std::int64_t t) {
  SensorFrame f;
  f.t = t;
  for (std::size_t i = 0; i < kSensorCount; ++i) f.sensors[i] = static_cast<double>(t) / 100.0 + i / 1000.0;
  return f;
}

FrameHistory history_of(int n, std::size_t capacity = 16) {
  FrameHistory h(capacity);
  for (int t = 0; t < n; ++t) h.push(frame_at(t));
  return h;
}

}  // namespace

TEST(CommandMap, TableRows) {
  using C = RobotCommand;
  const struct {
    int g;
    C on;
    C off;
  } rows[] = {{1, C::Stop, C::Stop},       {2, C::XPlus, C::RXPlus},        {3, C::XMinus, C::RXMinus},
              {4, C::YPlus, C::RYPlus},    {5, C::YMinus, C::RYMinus},      {6, C::ZPlus, C::RZPlus},
              {7, C::ZMinus, C::RZMinus},  {8, C::SavePose, C::SavePose},   {9, C::ReturnToSaved, C::Loop},
              {10, C::VacuumOn, C::VacuumOff}};
  for (const auto& r : rows) {
    EXPECT_EQ(map_command(r.g, true), r.on) << "G" << r.g;
    EXPECT_EQ(map_command(r.g, false), r.off) << "G" << r.g;
  }
  EXPECT_EQ(map_command(11, true), std::nullopt);
  EXPECT_EQ(map_command(30, false), std::nullopt);
  EXPECT_EQ(map_command(0, true), std::nullopt);
}

TEST(CommandMap, DistinctCommandCount) {
  // Twenty pairs with G1 and G8 repeated across button states leave eighteen.
  std::set<RobotCommand> distinct;
  for (int g = 1; g <= 10; ++g) {
    for (bool b : {true, false}) distinct.insert(*map_command(g, b));
  }
  EXPECT_EQ(distinct.size(), 18u);
  EXPECT_EQ(distinct.size(), kAllCommands.size());
}

TEST(CommandMap, NamesRoundTrip) {
  for (RobotCommand c : kAllCommands) EXPECT_EQ(parse_command(to_string(c)), c);
  EXPECT_EQ(to_string(RobotCommand::XPlus), "X+");
  EXPECT_EQ(to_string(RobotCommand::RZMinus), "RZ-");
  EXPECT_THROW(parse_command("Fly"), ParseError);
  EXPECT_TRUE(is_motion(RobotCommand::RYPlus));
  EXPECT_FALSE(is_motion(RobotCommand::Stop));
  EXPECT_TRUE(is_one_shot(RobotCommand::Loop));
  EXPECT_FALSE(is_one_shot(RobotCommand::XMinus));
}

TEST(Labels, TextForms) {
  EXPECT_EQ(GestureLabel::communicative(6).to_string(), "G6");
  EXPECT_EQ(GestureLabel::non_gesture(2).to_string(), "N2");
  EXPECT_EQ(GestureLabel::parse("G30"), GestureLabel::communicative(30));
  EXPECT_EQ(GestureLabel::parse("N1"), GestureLabel::non_gesture(1));
  EXPECT_THROW(GestureLabel::parse("X3"), ParseError);
  EXPECT_THROW(GestureLabel::communicative(11).validate(10, 0), InvalidInput);
  EXPECT_NO_THROW(GestureLabel::non_gesture(3).validate(10, 3));
}

TEST(OneHot, Encoding) {
  const auto first = one_hot(1, 10);
  EXPECT_EQ(first, (std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(one_hot(10, 10).back(), 1.0);
  const auto last = one_hot(30, 30);
  EXPECT_EQ(last.size(), 30u);
  EXPECT_EQ(last.back(), 1.0);
  EXPECT_EQ(std::accumulate(last.begin(), last.end(), 0.0), 1.0);
  EXPECT_THROW(one_hot(11, 10), InvalidInput);
  EXPECT_THROW(one_hot(0, 10), InvalidInput);
}

TEST(Normalize, Calibration) {
  CalibrationProfile cal;
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    cal.min[i] = 10.0 + i;
    cal.max[i] = 200.0 + i;
  }
  EXPECT_EQ(normalize(cal.min, cal), SensorArray{});
  SensorArray ones;
  ones.fill(1.0);
  EXPECT_EQ(normalize(cal.max, cal), ones);
  SensorArray beyond = cal.max;
  beyond[3] += 500.0;
  beyond[4] = -1e6;
  const SensorArray n = normalize(beyond, cal);
  EXPECT_EQ(n[3], 1.0);
  EXPECT_EQ(n[4], 0.0);

  SensorArray already;
  for (std::size_t i = 0; i < kSensorCount; ++i) already[i] = i / 21.0;
  const CalibrationProfile id = CalibrationProfile::identity();
  EXPECT_EQ(normalize(already, id), already);
  EXPECT_EQ(normalize(normalize(already, id), id), already);

  CalibrationProfile bad = id;
  bad.max[0] = bad.min[0];
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Features, ConsecutiveReadings) {
  const FrameHistory h = history_of(2);
  const FeatureVector f = extract_feature(h, 1, 1);
  ASSERT_EQ(f.values.size(), 44u);
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    EXPECT_EQ(f.values[i], frame_at(0).sensors[i]);
    EXPECT_EQ(f.values[kSensorCount + i], frame_at(1).sensors[i]);
  }
}

TEST(Features, LagThreeSpansFortyFiveMs) {
  const FrameHistory h = history_of(11);
  const FeatureVector f = extract_feature(h, 10, 3);
  EXPECT_EQ(f.lag, 3);
  EXPECT_EQ(f.values[0], frame_at(7).sensors[0]);
  EXPECT_EQ(f.values[kSensorCount], frame_at(10).sensors[0]);
  EXPECT_EQ(3 * kFramePeriodMs, 45);
}

TEST(Features, EarliestFrameSubstitutesAtStreamStart) {
  const FrameHistory h = history_of(2);
  const FeatureVector f = extract_feature(h, 1, 3);
  EXPECT_EQ(f.values[0], frame_at(0).sensors[0]);
  EXPECT_EQ(f.values[kSensorCount], frame_at(1).sensors[0]);
}

TEST(Features, Errors) {
  const FrameHistory h = history_of(3);
  EXPECT_THROW(extract_feature(h, 7, 1), MissingFrame);
  EXPECT_THROW(extract_feature(h, 2, 0), InvalidInput);
}

TEST(History, OrderAndCapacity) {
  FrameHistory h(4);
  for (int t = 0; t < 10; ++t) h.push(frame_at(t));
  EXPECT_EQ(h.size(), 4u);
  EXPECT_EQ(h.earliest().t, 6);
  EXPECT_EQ(h.latest().t, 9);
  EXPECT_THROW(h.push(frame_at(9)), StreamOrderError);
  EXPECT_THROW(h.push(frame_at(3)), StreamOrderError);
  EXPECT_EQ(h.find(5), nullptr);
  ASSERT_NE(h.at_or_before(100), nullptr);
  EXPECT_EQ(h.at_or_before(100)->t, 9);
}

TEST(StreamIo, RecordRoundTrip) {
  StreamRecord r{frame_at(12), FrameTruth::transition(5, 6)};
  r.frame.button = false;
  const StreamRecord back = parse_record(format_record(r));
  EXPECT_EQ(back.frame.t, 12);
  EXPECT_EQ(back.frame.sensors, r.frame.sensors);
  EXPECT_FALSE(back.frame.button);
  EXPECT_EQ(back.truth, r.truth);
  EXPECT_EQ(FrameTruth::parse("G5>G6"), FrameTruth::transition(5, 6));
  EXPECT_EQ(FrameTruth::parse("G6"), FrameTruth::hold(6));
  EXPECT_EQ(FrameTruth::parse("warmup"), FrameTruth::warmup());
  EXPECT_EQ(FrameTruth::transition(5, 6).to_string(), "G5>G6");
}

TEST(StreamIo, ValidationAndLineNumbers) {
  EXPECT_THROW(parse_record(R"({"t":1,"sensors":[0.5],"button":true})"), ParseError);
  std::string sensors = "[";
  for (int i = 0; i < 22; ++i) sensors += (i ? ",0.5" : "1.5");
  sensors += "]";
  try {
    parse_record(R"({"t":1,"button":true,"sensors":)" + sensors + "}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "sensors");
  }

  std::ostringstream out;
  const std::vector<StreamRecord> recs{{frame_at(0), std::nullopt}, {frame_at(1), FrameTruth::hold(2)}};
  write_stream(out, recs);
  std::istringstream good("\n" + out.str() + "\n");
  const auto back = read_stream(good);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].truth, FrameTruth::hold(2));

  std::istringstream bad(out.str() + "{\"t\":2}\n");
  try {
    read_stream(bad);
    FAIL();
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 3"), std::string::npos);
    if (!e.field().empty()) EXPECT_EQ(what.find(e.field()), what.rfind(e.field())) << what;
  }
}
