#include <string>

#include "glovespot/error.hpp"
#include "glovespot/model_io.hpp"
#include "glovespot/spotter.hpp"

namespace glovespot {

using nlohmann::json;

json to_document(const CascadeModel& cascade) {
  return json{{"format_version", kCascadeFormatVersion},
              {"kind", "cascade"},
              {"lag", cascade.lag},
              {"threshold", cascade.threshold},
              {"debounce", cascade.debounce},
              {"edge_triggered_one_shots", cascade.edge_triggered_one_shots},
              {"comm", mlp::to_document(cascade.comm)},
              {"non_gesture", cascade.non_gesture ? mlp::to_document(*cascade.non_gesture) : json(nullptr)}};
}

CascadeModel cascade_from_document(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "cascade document must be an object");
  auto field = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) throw ParseError(key, "missing field");
    return *it;
  };
  const json& version = field("format_version");
  if (!version.is_number_integer() || version.get<int>() != kCascadeFormatVersion) {
    throw ParseError("format_version", "unsupported version " + version.dump());
  }
  if (field("kind") != "cascade") throw ParseError("kind", "expected \"cascade\"");

  auto nested = [](const json& j, const std::string& prefix) {
    try {
      return mlp::from_document(j);
    } catch (const ParseError& e) {
      throw ParseError(prefix + (e.field().empty() ? "" : "." + e.field()), e.what());
    }
  };

  CascadeModel c{nested(field("comm"), "comm"), std::nullopt};
  if (const json& non = field("non_gesture"); !non.is_null()) c.non_gesture = nested(non, "non_gesture");

  const json& lag = field("lag");
  if (!lag.is_number_integer()) throw ParseError("lag", "expected an integer");
  c.lag = lag.get<int>();
  const json& threshold = field("threshold");
  if (!threshold.is_number()) throw ParseError("threshold", "expected a number");
  c.threshold = threshold.get<double>();
  const json& debounce = field("debounce");
  if (!debounce.is_number_integer()) throw ParseError("debounce", "expected an integer");
  c.debounce = debounce.get<int>();
  c.edge_triggered_one_shots = doc.value("edge_triggered_one_shots", false);

  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ParseError("cascade", e.what());
  }
  return c;
}

}  // namespace glovespot
