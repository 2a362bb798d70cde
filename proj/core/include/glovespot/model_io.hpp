#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "glovespot/mlp.hpp"

namespace glovespot::mlp {

inline constexpr int kModelFormatVersion = 1;

/// {format_version, layer_sizes, weights (row-major per layer), biases,
///  seed, trained_epochs, alpha, beta}
nlohmann::json to_document(const Network& net);

/// Throws ParseError naming the offending field; never returns a partial network.
Network from_document(const nlohmann::json& doc);

std::string serialize(const Network& net);
Network deserialize(std::string_view text);

}  // namespace glovespot::mlp
