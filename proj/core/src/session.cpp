#include "glovespot/session.hpp"

#include <string>

#include "glovespot/error.hpp"
#include "glovespot/stream_io.hpp"

namespace glovespot {

using nlohmann::json;

ClientMessage client_message_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "message must be a JSON object");
  auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw ParseError("type", "expected a string");
  const std::string kind = type->get<std::string>();
  if (kind == "reset") return ResetMessage{};
  if (kind == "frame") return FrameMessage{record_from_json(doc).frame};
  throw ParseError("type", "unknown message type \"" + kind + "\"");
}

ClientMessage parse_client_message(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("", "message is not valid JSON");
  return client_message_from_json(doc);
}

json error_reply(std::string_view message) { return {{"type", "error"}, {"message", message}}; }

Session::Session(std::shared_ptr<const CascadeModel> cascade, robot::SimConfig sim)
    : cascade_(std::move(cascade)), sim_(sim), spotter_(*cascade_) {
  sim_.validate();
}

json Session::on_frame(const SensorFrame& frame, int queue_depth) {
  const StepOutput out = step(spotter_, *cascade_, frame);
  ++frames_;
  if (out.command) {
    try {
      robot_ = robot::apply_command(robot_, *out.command, sim_);
    } catch (const NoSavedPose&) {
      // Nothing saved yet: the robot ignores the request.
    }
  }
  robot_ = robot::tick(robot_, sim_);

  const SpotResult& r = out.result;
  json reply{{"type", "spot"},
             {"t", frame.t},
             {"decision", r.communicative ? GestureLabel::communicative(r.label).to_string() : "NonCommunicative"},
             {"label", nullptr},
             {"confidence", nullptr},
             {"command", nullptr},
             {"robot", robot::snapshot(robot_, frame.t)},
             {"queue_depth", queue_depth},
             {"warmup", out.warmup}};
  if (r.communicative) reply["confidence"] = r.confidence;
  if (out.emitted_label) reply["label"] = GestureLabel::communicative(*out.emitted_label).to_string();
  if (out.command) reply["command"] = to_string(*out.command);
  return reply;
}

json Session::on_reset() {
  spotter_.reset();
  robot_ = {};
  frames_ = 0;
  return {{"type", "reset"}, {"robot", robot::snapshot(robot_, 0)}};
}

json Session::handle(std::string_view text, int queue_depth) {
  try {
    const ClientMessage msg = parse_client_message(text);
    if (std::holds_alternative<ResetMessage>(msg)) return on_reset();
    return on_frame(std::get<FrameMessage>(msg).frame, queue_depth);
  } catch (const ParseError& e) {
    return error_reply(e.what());
  } catch (const StreamOrderError& e) {
    return error_reply(e.what());
  }
}

}  // namespace glovespot
