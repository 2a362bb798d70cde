#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "glovespot/harness.hpp"
#include "glovespot/session.hpp"
#include "glovespot/spotter.hpp"
#include "glovespot/stream_io.hpp"
#include "glovespot/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glovespot;

namespace {

// Runs the tool quietly and returns its exit status.
int run(const std::string& args) {
  const std::string cmd = std::string(GLOVESPOT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("glovespot_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path write(const std::string& name, const json& doc) {
    std::ofstream(dir / name) << doc.dump(2);
    return dir / name;
  }
  std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("fly"), 1);
  EXPECT_EQ(run("spot --model"), 1);
  EXPECT_EQ(run("train --config /nonexistent/config.json"), 2);
  EXPECT_EQ(run("train --preset test9 --out " + q(dir)), 2);
  EXPECT_EQ(run("eval --config " + q(write("bad.json", {{"lag", 0}}))), 2);
}

TEST_F(Cli, TemplatesAndStream) {
  ASSERT_EQ(run("gen-templates --seed 4 --out " + q(dir)), 0);
  const synth::TemplateSet t = synth::templates_from_json(read_json(dir / "templates.json"));
  EXPECT_EQ(t, synth::make_templates_with_triplet(10, 4, synth::Triplet{}, synth::kDefaultMinSeparation,
                                                 harness::kExperimentTightness));

  ASSERT_EQ(run("gen-templates --plain --count 30 --out " + q(dir / "plain")), 0);
  EXPECT_EQ(synth::templates_from_json(read_json(dir / "plain" / "templates.json")).size(), 30u);

  synth::ScenarioScript script;
  script.steps = {{1, 10, true}, {2, 10, false}};
  script.repetitions = 2;
  script.seed = 9;
  const fs::path script_file = write("script.json", synth::to_json(script));
  ASSERT_EQ(run("gen-stream --config " + q(script_file) + " --templates " + q(dir / "templates.json") +
                " --out " + q(dir)),
            0);
  std::ifstream in(dir / "stream.jsonl");
  const auto records = read_stream(in);
  const synth::AnnotatedStream expected = synth::generate_stream(script, t);
  ASSERT_EQ(records.size(), expected.frames.size());
  EXPECT_EQ(records.back().frame.sensors, expected.frames.back().sensors);
  EXPECT_EQ(records.back().truth, expected.truth.back());
}

TEST_F(Cli, TrainSpotEval) {
  harness::ExperimentConfig config = harness::ExperimentConfig::test3();
  config.name = "tiny";
  config.epochs = 20;
  config.train_reps = 3;
  config.eval_repetitions = 2;
  const fs::path config_file = write("config.json", harness::to_json(config));

  ASSERT_EQ(run("train --config " + q(config_file) + " --out " + q(dir / "model")), 0);
  const CascadeModel cascade = cascade_from_document(read_json(dir / "model" / "cascade.json"));
  EXPECT_EQ(cascade.lag, 3);
  EXPECT_EQ(cascade.non_gesture_count(), 3);
  EXPECT_EQ(harness::config_from_json(read_json(dir / "model" / "config.json")).epochs, 20u);

  // Replay a short stream offline and compare with an in-process session.
  const synth::TemplateSet t = synth::templates_from_json(read_json(dir / "model" / "templates.json"));
  synth::ScenarioScript script;
  script.steps = {{5, 30, true}, {6, 30, true}, {9, 30, false}};
  script.seed = 2;
  const synth::AnnotatedStream stream = synth::generate_stream(script, t);
  {
    std::ofstream out(dir / "stream.jsonl");
    const auto records = stream.records();
    write_stream(out, records);
  }
  ASSERT_EQ(run("spot --model " + q(dir / "model" / "cascade.json") + " --stream " + q(dir / "stream.jsonl") +
                " --out " + q(dir)),
            0);
  const auto lines = read_lines(dir / "decisions.jsonl");
  ASSERT_EQ(lines.size(), stream.frames.size());
  Session session(std::make_shared<const CascadeModel>(cascade));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    ASSERT_EQ(json::parse(lines[i]), session.on_frame(stream.frames[i])) << "line " << i;
  }

  ASSERT_EQ(run("eval --config " + q(config_file) + " --model " + q(dir / "model" / "cascade.json") +
                " --templates " + q(dir / "model" / "templates.json") + " --out " + q(dir / "results")),
            0);
  const fs::path report = dir / "results" / harness::config_hash(config) / "report.json";
  ASSERT_TRUE(fs::exists(report));
  EXPECT_EQ(harness::report_from_json(read_json(report)).total_instances(), 20);
  EXPECT_TRUE(fs::exists(report.parent_path() / "report.md"));
}
