#include "glovespot/model_io.hpp"

#include <cmath>

#include "glovespot/error.hpp"

namespace glovespot::mlp {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.is_object()) throw ParseError("", "model document must be an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(key, "missing field");
  return *it;
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) throw ParseError(field, "expected a number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

json to_document(const Network& net) {
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < net.weight_layer_count(); ++l) {
    weights.push_back(net.weights(l).data);
    biases.push_back(net.biases(l));
  }
  const Provenance& p = net.provenance();
  return json{{"format_version", kModelFormatVersion},
              {"layer_sizes", net.layer_sizes()},
              {"weights", std::move(weights)},
              {"biases", std::move(biases)},
              {"seed", p.seed},
              {"trained_epochs", p.trained_epochs},
              {"alpha", p.alpha},
              {"beta", p.beta}};
}

Network from_document(const json& doc) {
  const json& version = require(doc, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw ParseError("format_version", "unsupported version " + version.dump());
  }

  const json& sizes_j = require(doc, "layer_sizes");
  if (!sizes_j.is_array()) throw ParseError("layer_sizes", "expected an array");
  std::vector<std::size_t> sizes;
  for (const json& s : sizes_j) {
    if (!s.is_number_unsigned()) throw ParseError("layer_sizes", "expected positive integers");
    sizes.push_back(s.get<std::size_t>());
  }
  if (sizes.size() < 3) throw ParseError("layer_sizes", "need at least 3 layers");

  const json& weights_j = require(doc, "weights");
  const json& biases_j = require(doc, "biases");
  const std::size_t wl = sizes.size() - 1;
  if (!weights_j.is_array() || weights_j.size() != wl) {
    throw ParseError("weights", "expected " + std::to_string(wl) + " layers");
  }
  if (!biases_j.is_array() || biases_j.size() != wl) {
    throw ParseError("biases", "expected " + std::to_string(wl) + " layers");
  }

  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  for (std::size_t l = 0; l < wl; ++l) {
    const std::string wf = "weights[" + std::to_string(l) + "]";
    const std::string bf = "biases[" + std::to_string(l) + "]";
    Matrix w(sizes[l + 1], sizes[l]);
    w.data = number_array(weights_j[l], wf);
    if (w.data.size() != w.rows * w.cols) {
      throw ParseError(wf, "expected " + std::to_string(w.rows * w.cols) + " values");
    }
    std::vector<double> b = number_array(biases_j[l], bf);
    if (b.size() != sizes[l + 1]) throw ParseError(bf, "expected " + std::to_string(sizes[l + 1]) + " values");
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }

  Provenance p;
  const json& seed = require(doc, "seed");
  if (!seed.is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
  p.seed = seed.get<std::uint64_t>();
  const json& epochs = require(doc, "trained_epochs");
  if (!epochs.is_number_unsigned()) throw ParseError("trained_epochs", "expected a non-negative integer");
  p.trained_epochs = epochs.get<std::size_t>();
  const json& alpha = require(doc, "alpha");
  if (!alpha.is_number()) throw ParseError("alpha", "expected a number");
  p.alpha = alpha.get<double>();
  const json& beta = require(doc, "beta");
  if (!beta.is_number()) throw ParseError("beta", "expected a number");
  p.beta = beta.get<double>();

  try {
    return Network(std::move(sizes), std::move(weights), std::move(biases), p);
  } catch (const Error& e) {
    throw ParseError("weights", e.what());
  }
}

std::string serialize(const Network& net) { return to_document(net).dump(); }

Network deserialize(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("", "model document is not valid JSON");
  return from_document(doc);
}

}  // namespace glovespot::mlp
