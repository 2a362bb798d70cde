// glovespot command-line front end.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glovespot/error.hpp"
#include "glovespot/harness.hpp"
#include "glovespot/model_io.hpp"
#include "glovespot/service.hpp"
#include "glovespot/session.hpp"
#include "glovespot/stream_io.hpp"
#include "glovespot/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glovespot;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(path + " is not valid JSON");
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

// Opens `dir/name`, or stdout when no directory was given.
class Output {
 public:
  Output(const std::optional<std::string>& dir, const std::string& name) {
    if (dir) {
      fs::create_directories(*dir);
      path_ = fs::path(*dir) / name;
      file_.open(*path_, std::ios::binary);
      if (!file_) throw Error("cannot write " + path_->string());
    }
  }
  std::ostream& stream() { return path_ ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Error("write failed");
    if (path_) std::cerr << "wrote " << path_->string() << "\n";
  }

 private:
  std::optional<fs::path> path_;
  std::ofstream file_;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& config_help) {
  cmd->add_option("--seed", c.seed, "Override the seed(s)");
  cmd->add_option("--config", c.config, config_help);
  cmd->add_option("--out", c.out, "Output directory");
}

harness::ExperimentConfig load_experiment(const Common& c, const std::string& preset) {
  harness::ExperimentConfig config;
  if (c.config) {
    config = harness::config_from_json(read_json_file(*c.config));
  } else if (preset == "test1") {
    config = harness::ExperimentConfig::test1();
  } else if (preset == "test2") {
    config = harness::ExperimentConfig::test2();
  } else if (preset == "test3") {
    config = harness::ExperimentConfig::test3();
  } else if (preset == "test4") {
    config = harness::ExperimentConfig::test4();
  } else {
    throw InvalidInput("unknown preset " + preset);
  }
  if (c.seed) {
    config.template_seed = *c.seed;
    config.train_seed = *c.seed + 1;
    config.eval_seed = *c.seed + 2;
  }
  return config;
}

std::shared_ptr<const CascadeModel> load_cascade(const std::string& path) {
  return std::make_shared<const CascadeModel>(cascade_from_document(read_json_file(path)));
}

int cmd_gen_templates(const Common& c, int count, bool plain, double tightness) {
  const std::uint64_t seed = c.seed.value_or(1);
  synth::TemplateSet templates = plain ? synth::make_templates(count, seed)
                                       : synth::make_templates_with_triplet(count, seed, synth::Triplet{},
                                                                            synth::kDefaultMinSeparation,
                                                                            tightness);
  Output out(c.out, "templates.json");
  out.stream() << synth::templates_to_json(templates).dump(2) << "\n";
  out.finish();
  return 0;
}

int cmd_gen_stream(const Common& c, const std::string& templates_path) {
  if (!c.config) throw InvalidInput("gen-stream needs --config <scenario script>");
  synth::ScenarioScript script = synth::script_from_json(read_json_file(*c.config));
  if (c.seed) script.seed = *c.seed;
  const synth::TemplateSet templates = synth::templates_from_json(read_json_file(templates_path));
  const synth::AnnotatedStream stream = synth::generate_stream(script, templates);
  Output out(c.out, "stream.jsonl");
  const auto records = stream.records();
  write_stream(out.stream(), records);
  out.finish();
  return 0;
}

int cmd_train(const Common& c, const std::string& preset) {
  const harness::ExperimentConfig config = load_experiment(c, preset);
  const synth::TemplateSet templates = harness::make_experiment_templates(config);
  const harness::TrainedCascade trained = harness::train_cascade(templates, config);
  const fs::path dir = c.out.value_or("model");
  write_text(dir / "cascade.json", to_document(trained.cascade).dump() + "\n");
  write_text(dir / "templates.json", synth::templates_to_json(templates).dump(2) + "\n");
  write_text(dir / "config.json", harness::to_json(config).dump(2) + "\n");
  const double comm_final = trained.comm_loss.empty() ? 0.0 : trained.comm_loss.back();
  std::cout << "trained " << config.name << ": comm loss " << comm_final;
  if (!trained.non_gesture_loss.empty()) std::cout << ", non-gesture loss " << trained.non_gesture_loss.back();
  std::cout << " (" << trained.train_seconds << " s)\nwrote " << dir.string() << "\n";
  return 0;
}

int cmd_eval(const Common& c, const std::string& preset, const std::optional<std::string>& model_path,
             const std::optional<std::string>& templates_path, bool timing) {
  harness::ExperimentConfig config = load_experiment(c, preset);
  config.measure_timing = timing;
  harness::EvalReport report;
  if (model_path) {
    const auto cascade = load_cascade(*model_path);
    const synth::TemplateSet templates = templates_path
                                             ? synth::templates_from_json(read_json_file(*templates_path))
                                             : harness::make_experiment_templates(config);
    report = harness::evaluate(*cascade, templates, config);
  } else {
    report = harness::run_experiment(config);
  }
  const fs::path dir = fs::path(c.out.value_or("results")) / harness::config_hash(config);
  harness::write_report_files(report, dir);
  std::cout << harness::emit_report(report, harness::ReportFormat::Markdown);
  std::cout << "\nmean RR " << report.mean_rr << "%\nwrote " << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_spot(const Common& c, const std::string& model_path, const std::string& stream_path) {
  const auto cascade = load_cascade(model_path);
  std::ifstream in(stream_path);
  if (!in) throw Error("cannot open " + stream_path);
  const std::vector<StreamRecord> records = read_stream(in);
  Session session(cascade);
  Output out(c.out, "decisions.jsonl");
  for (const StreamRecord& r : records) {
    out.stream() << session.on_frame(r.frame).dump() << "\n";
  }
  out.finish();
  return 0;
}

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& model_path, const std::optional<std::string>& templates_path,
              const std::optional<std::string>& bind, int threads) {
  service::ServiceModel model;
  model.cascade = load_cascade(model_path);
  model.info = service::model_info(*model.cascade);
  model.info["source"] = model_path;
  if (templates_path) model.templates = synth::templates_to_json(
                          synth::templates_from_json(read_json_file(*templates_path)))["templates"];
  const service::Endpoint endpoint = service::resolve_bind(bind);
  service::Server server(std::move(model), endpoint, threads);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << endpoint.host << ":" << server.port() << "\n";
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glovespot: real-time glove gesture spotting"};
  app.require_subcommand(1);

  Common common;
  std::string preset = "test1";

  auto* gen_templates = app.add_subcommand("gen-templates", "Generate gesture pose templates");
  add_common(gen_templates, common, "Unused");
  int count = 10;
  bool plain = false;
  double tightness = harness::kExperimentTightness;
  gen_templates->add_option("--count", count, "Number of gestures")->check(CLI::PositiveNumber);
  gen_templates->add_flag("--plain", plain, "Skip the confusable G5/G6/G7 arrangement");
  gen_templates->add_option("--tightness", tightness, "Distance of G7 from the G5-G6 midpoint");

  auto* gen_stream = app.add_subcommand("gen-stream", "Render a scenario script into a glove stream");
  add_common(gen_stream, common, "Scenario script (JSON)");
  std::string templates_in;
  gen_stream->add_option("--templates", templates_in, "Templates file")->required();

  auto* train = app.add_subcommand("train", "Train a cascade for an experiment configuration");
  add_common(train, common, "Experiment configuration (JSON)");
  train->add_option("--preset", preset, "test1 | test2 | test3 | test4 when --config is absent");

  auto* eval = app.add_subcommand("eval", "Run and score an experiment");
  add_common(eval, common, "Experiment configuration (JSON)");
  eval->add_option("--preset", preset, "test1 | test2 | test3 | test4 when --config is absent");
  std::optional<std::string> model_in;
  std::optional<std::string> templates_opt;
  bool timing = false;
  eval->add_option("--model", model_in, "Evaluate this cascade instead of training one");
  eval->add_option("--templates", templates_opt, "Templates the cascade was trained on");
  eval->add_flag("--timing", timing, "Include wall-clock latency (report is then not reproducible)");

  auto* spot = app.add_subcommand("spot", "Replay a recorded stream through a cascade");
  add_common(spot, common, "Unused");
  std::string spot_model;
  std::string spot_stream;
  spot->add_option("--model", spot_model, "Cascade document")->required();
  spot->add_option("--stream", spot_stream, "Newline-delimited JSON frames")->required();

  auto* serve = app.add_subcommand("serve", "Serve /health, /model, /templates and the /session channel");
  std::string serve_model;
  std::optional<std::string> serve_templates;
  std::optional<std::string> bind;
  int threads = 1;
  serve->add_option("--model", serve_model, "Cascade document")->required();
  serve->add_option("--templates", serve_templates, "Templates file for /templates");
  serve->add_option("--bind", bind, "host:port (default: $GLOVESPOT_BIND or 127.0.0.1:8765)");
  serve->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*gen_templates) return cmd_gen_templates(common, count, plain, tightness);
    if (*gen_stream) return cmd_gen_stream(common, templates_in);
    if (*train) return cmd_train(common, preset);
    if (*eval) return cmd_eval(common, preset, model_in, templates_opt, timing);
    if (*spot) return cmd_spot(common, spot_model, spot_stream);
    if (*serve) return cmd_serve(serve_model, serve_templates, bind, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
