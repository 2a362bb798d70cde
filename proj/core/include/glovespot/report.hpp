#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace glovespot::harness {

struct GestureRow {
  std::string label;
  int instances = 0;
  int recognized = 0;
  int substitutions = 0;
  int insertions = 0;  ///< false alarms in the transitions leading into this gesture
  int deletions = 0;
  double rr = 0.0;     ///< recognition rate in percent

  bool operator==(const GestureRow&) const = default;
};

/// Transition windows between consecutive holds, keyed by their endpoints.
struct TransitionRow {
  std::string from;
  std::string to;
  int occurrences = 0;
  int false_alarm_runs = 0;           ///< emissions confined to the window, label not an endpoint
  int windows_with_false_alarm = 0;   ///< windows where any frame emits a non-endpoint label
  int windows_with_any_emission = 0;  ///< windows where any frame emits anything

  bool operator==(const TransitionRow&) const = default;
};

struct Timing {
  double mean_ms = 0.0;  ///< per-frame spotter step
  double p99_ms = 0.0;
  double train_seconds = 0.0;

  bool operator==(const Timing&) const = default;
};

struct EvalReport {
  nlohmann::json config = nlohmann::json::object();
  std::vector<GestureRow> per_gesture;  ///< evaluation-sequence order
  double mean_rr = 0.0;
  std::vector<TransitionRow> transitions;
  int loop_commands = 0;  ///< frames that emitted the undefined Loop command
  std::optional<Timing> timing;

  const GestureRow* row(const std::string& label) const;
  int total_instances() const;

  bool operator==(const EvalReport&) const = default;
};

enum class ReportFormat { Markdown, Json };

nlohmann::json to_json(const EvalReport& report);
/// Throws ParseError naming the field.
EvalReport report_from_json(const nlohmann::json& doc);

/// Markdown table (one column) or the pretty-printed JSON document.
std::string emit_report(const EvalReport& report, ReportFormat format);

/// Several runs side by side: gesture rows, one RR column per report, Mean row.
std::string render_comparison(std::span<const EvalReport> reports, std::span<const std::string> column_names);

/// Writes report.json and report.md into `dir`, creating it.
void write_report_files(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace glovespot::harness
