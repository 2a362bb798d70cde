#include "glovespot/stream_io.hpp"

#include <istream>
#include <ostream>

#include "glovespot/error.hpp"

namespace glovespot {

using nlohmann::json;

std::string FrameTruth::to_string() const {
  switch (kind) {
    case Kind::Hold:
      return GestureLabel::communicative(label).to_string();
    case Kind::Transition:
      return GestureLabel::communicative(from).to_string() + ">" +
             GestureLabel::communicative(to).to_string();
    case Kind::Warmup:
      break;
  }
  return "warmup";
}

FrameTruth FrameTruth::parse(std::string_view text) {
  if (text == "warmup") return warmup();
  auto gesture = [](std::string_view s) {
    GestureLabel l = GestureLabel::parse(s);
    if (l.kind != GestureLabel::Kind::Communicative) {
      throw ParseError("truth", "truth labels must be communicative gestures");
    }
    return l.index;
  };
  if (auto sep = text.find('>'); sep != std::string_view::npos) {
    return transition(gesture(text.substr(0, sep)), gesture(text.substr(sep + 1)));
  }
  return hold(gesture(text));
}

json to_json(const StreamRecord& record) {
  json j{{"t", record.frame.t}, {"sensors", record.frame.sensors}, {"button", record.frame.button}};
  if (record.truth) j["truth"] = record.truth->to_string();
  return j;
}

StreamRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("", "frame must be a JSON object");
  StreamRecord r;
  auto t = j.find("t");
  if (t == j.end() || !t->is_number_integer()) throw ParseError("t", "expected an integer");
  r.frame.t = t->get<std::int64_t>();
  auto sensors = j.find("sensors");
  if (sensors == j.end() || !sensors->is_array() || sensors->size() != kSensorCount) {
    throw ParseError("sensors", "expected an array of 22 numbers");
  }
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    const json& v = (*sensors)[i];
    if (!v.is_number()) throw ParseError("sensors", "expected numbers");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) throw ParseError("sensors", "values must lie in [0, 1]");
    r.frame.sensors[i] = x;
  }
  auto button = j.find("button");
  if (button == j.end() || !button->is_boolean()) throw ParseError("button", "expected a boolean");
  r.frame.button = button->get<bool>();
  if (auto truth = j.find("truth"); truth != j.end() && !truth->is_null()) {
    if (!truth->is_string()) throw ParseError("truth", "expected a string");
    r.truth = FrameTruth::parse(truth->get<std::string>());
  }
  return r;
}

std::string format_record(const StreamRecord& record) { return to_json(record).dump(); }

StreamRecord parse_record(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError("", "line is not valid JSON");
  return record_from_json(j);
}

std::vector<StreamRecord> read_stream(std::istream& in) {
  std::vector<StreamRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const ParseError& e) {
      // Rebuild the message so the field name is not repeated.
      std::string what = e.what();
      if (!e.field().empty()) what.erase(0, e.field().size() + 2);
      throw ParseError(e.field(), "line " + std::to_string(line_no) + ": " + what);
    }
  }
  return out;
}

void write_stream(std::ostream& out, std::span<const StreamRecord> records) {
  for (const StreamRecord& r : records) out << format_record(r) << '\n';
}

}  // namespace glovespot
