#include "glovespot/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "glovespot/error.hpp"

namespace glovespot::harness {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

template <typename T>
T field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(key, "missing");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(key, "wrong type");
  }
}

}  // namespace

const GestureRow* EvalReport::row(const std::string& label) const {
  for (const GestureRow& r : per_gesture) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

int EvalReport::total_instances() const {
  int n = 0;
  for (const GestureRow& r : per_gesture) n += r.instances;
  return n;
}

json to_json(const EvalReport& report) {
  json rows = json::array();
  for (const GestureRow& r : report.per_gesture) {
    rows.push_back({{"label", r.label},
                    {"instances", r.instances},
                    {"recognized", r.recognized},
                    {"substitutions", r.substitutions},
                    {"insertions", r.insertions},
                    {"deletions", r.deletions},
                    {"rr", r.rr}});
  }
  json transitions = json::array();
  for (const TransitionRow& t : report.transitions) {
    transitions.push_back({{"from", t.from},
                           {"to", t.to},
                           {"occurrences", t.occurrences},
                           {"false_alarm_runs", t.false_alarm_runs},
                           {"windows_with_false_alarm", t.windows_with_false_alarm},
                           {"windows_with_any_emission", t.windows_with_any_emission}});
  }
  json doc{{"config", report.config},
           {"per_gesture", std::move(rows)},
           {"mean_rr", report.mean_rr},
           {"transitions", std::move(transitions)},
           {"loop_commands", report.loop_commands}};
  if (report.timing) {
    doc["latency"] = {{"mean_ms", report.timing->mean_ms},
                     {"p99_ms", report.timing->p99_ms},
                     {"train_seconds", report.timing->train_seconds}};
  }
  return doc;
}

EvalReport report_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "report must be a JSON object");
  EvalReport r;
  r.config = doc.value("config", json::object());
  r.mean_rr = field<double>(doc, "mean_rr");
  r.loop_commands = doc.contains("loop_commands") ? field<int>(doc, "loop_commands") : 0;
  const json rows = field<json>(doc, "per_gesture");
  if (!rows.is_array()) throw ParseError("per_gesture", "expected an array");
  for (const json& j : rows) {
    try {
      r.per_gesture.push_back({field<std::string>(j, "label"), field<int>(j, "instances"),
                               field<int>(j, "recognized"), field<int>(j, "substitutions"),
                               field<int>(j, "insertions"), field<int>(j, "deletions"), field<double>(j, "rr")});
    } catch (const ParseError& e) {
      throw ParseError("per_gesture." + e.field(), "missing or wrong type");
    }
  }
  if (auto it = doc.find("transitions"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("transitions", "expected an array");
    for (const json& j : *it) {
      try {
        r.transitions.push_back({field<std::string>(j, "from"), field<std::string>(j, "to"),
                                 field<int>(j, "occurrences"), field<int>(j, "false_alarm_runs"),
                                 field<int>(j, "windows_with_false_alarm"),
                                 field<int>(j, "windows_with_any_emission")});
      } catch (const ParseError& e) {
        throw ParseError("transitions." + e.field(), "missing or wrong type");
      }
    }
  }
  if (auto it = doc.find("latency"); it != doc.end() && !it->is_null()) {
    try {
      r.timing = Timing{field<double>(*it, "mean_ms"), field<double>(*it, "p99_ms"),
                        field<double>(*it, "train_seconds")};
    } catch (const ParseError& e) {
      throw ParseError("latency." + e.field(), "missing or wrong type");
    }
  }
  return r;
}

std::string emit_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return to_json(report).dump(2) + "\n";

  std::ostringstream md;
  const std::string name = report.config.value("name", std::string{});
  md << "# Evaluation" << (name.empty() ? "" : ": " + name) << "\n\n";
  md << "| Gesture | Instances | Recognized | Substitutions | Insertions | Deletions | RR (%) |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const GestureRow& r : report.per_gesture) {
    md << "| " << r.label << " | " << r.instances << " | " << r.recognized << " | " << r.substitutions << " | "
       << r.insertions << " | " << r.deletions << " | " << fixed(r.rr) << " |\n";
  }
  if (!report.per_gesture.empty()) md << "| Mean | | | | | | " << fixed(report.mean_rr) << " |\n";

  if (!report.transitions.empty()) {
    md << "\n| Transition | Windows | False-alarm runs | Windows with false alarm | Windows with any emission |\n";
    md << "|---|---|---|---|---|\n";
    for (const TransitionRow& t : report.transitions) {
      md << "| " << t.from << "->" << t.to << " | " << t.occurrences << " | " << t.false_alarm_runs << " | "
         << t.windows_with_false_alarm << " | " << t.windows_with_any_emission << " |\n";
    }
  }
  if (report.loop_commands > 0) md << "\nLoop commands (not implemented on the robot): " << report.loop_commands << "\n";
  if (report.timing) {
    md << "\nSpotter step: mean " << fixed(report.timing->mean_ms, 4) << " ms, p99 "
       << fixed(report.timing->p99_ms, 4) << " ms; training " << fixed(report.timing->train_seconds, 2) << " s\n";
  }
  return md.str();
}

std::string render_comparison(std::span<const EvalReport> reports, std::span<const std::string> column_names) {
  if (reports.size() != column_names.size()) {
    throw DimensionError("one column name per report is required");
  }
  // Row labels in first-seen order across all reports.
  std::vector<std::string> labels;
  for (const EvalReport& r : reports) {
    for (const GestureRow& row : r.per_gesture) {
      if (std::find(labels.begin(), labels.end(), row.label) == labels.end()) labels.push_back(row.label);
    }
  }
  std::ostringstream md;
  md << "| Gesture |";
  for (const std::string& c : column_names) md << " " << c << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < column_names.size(); ++i) md << "---|";
  md << "\n";
  for (const std::string& label : labels) {
    md << "| " << label << " |";
    for (const EvalReport& r : reports) {
      const GestureRow* row = r.row(label);
      md << " " << (row ? fixed(row->rr) : "") << " |";
    }
    md << "\n";
  }
  md << "| Mean |";
  for (const EvalReport& r : reports) md << " " << fixed(r.mean_rr) << " |";
  md << "\n";
  return md.str();
}

void write_report_files(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error("cannot write " + path.string());
  };
  write(dir / "report.json", emit_report(report, ReportFormat::Json));
  write(dir / "report.md", emit_report(report, ReportFormat::Markdown));
}

}  // namespace glovespot::harness
