#include "glovespot/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "glovespot/error.hpp"
#include "glovespot/rng.hpp"

namespace glovespot::mlp {

namespace {

void check_topology(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 3) {
    throw InvalidTopology("network needs at least 3 layers, got " + std::to_string(sizes.size()));
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw InvalidTopology("layer " + std::to_string(i + 1) + " has zero neurons");
  }
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// Computes fields and activations into a preallocated trace.
void forward_into(const Network& net, std::span<const double> input, ForwardTrace& trace) {
  const std::size_t layers = net.layer_count();
  trace.fields.resize(layers);
  trace.activations.resize(layers);
  trace.activations[0].assign(input.begin(), input.end());
  trace.fields[0].clear();
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    const Matrix& w = net.weights(l);
    const std::vector<double>& b = net.biases(l);
    const std::vector<double>& prev = trace.activations[l];
    std::vector<double>& v = trace.fields[l + 1];
    std::vector<double>& y = trace.activations[l + 1];
    v.resize(w.rows);
    y.resize(w.rows);
    for (std::size_t k = 0; k < w.rows; ++k) {
      const double* row = w.data.data() + k * w.cols;
      double sum = b[k];
      for (std::size_t j = 0; j < w.cols; ++j) sum += row[j] * prev[j];
      v[k] = sum;
      y[k] = activate(sum);
    }
  }
}

void deltas_into(const Network& net, const ForwardTrace& trace, std::span<const double> target,
                 Deltas& deltas) {
  const std::size_t wl = net.weight_layer_count();
  deltas.resize(wl);
  const std::vector<double>& out = trace.activations.back();
  std::vector<double>& d_out = deltas[wl - 1];
  d_out.resize(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    d_out[k] = (target[k] - out[k]) * activate_derivative(out[k]);
  }
  // Hidden layers, all from the pre-update weights.
  for (std::size_t l = wl - 1; l-- > 0;) {
    const Matrix& w_next = net.weights(l + 1);
    const std::vector<double>& d_next = deltas[l + 1];
    const std::vector<double>& y = trace.activations[l + 1];
    std::vector<double>& d = deltas[l];
    d.assign(y.size(), 0.0);
    for (std::size_t j = 0; j < w_next.rows; ++j) {
      const double* row = w_next.data.data() + j * w_next.cols;
      const double dj = d_next[j];
      for (std::size_t k = 0; k < w_next.cols; ++k) d[k] += dj * row[k];
    }
    for (std::size_t k = 0; k < d.size(); ++k) d[k] *= activate_derivative(y[k]);
  }
}

void check_trace(const Network& net, const ForwardTrace& trace) {
  if (trace.activations.size() != net.layer_count()) {
    throw DimensionError("trace has " + std::to_string(trace.activations.size()) +
                         " layers, network has " + std::to_string(net.layer_count()));
  }
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    if (trace.activations[i].size() != net.layer_sizes()[i]) {
      throw DimensionError("trace layer " + std::to_string(i + 1) + " width mismatch");
    }
  }
}

}  // namespace

Network::Network(std::vector<std::size_t> layer_sizes, std::vector<Matrix> weights,
                 std::vector<std::vector<double>> biases, Provenance provenance)
    : sizes_(std::move(layer_sizes)),
      weights_(std::move(weights)),
      biases_(std::move(biases)),
      provenance_(provenance) {
  check_topology(sizes_);
  const std::size_t wl = sizes_.size() - 1;
  if (weights_.size() != wl || biases_.size() != wl) {
    throw DimensionError("expected " + std::to_string(wl) + " weight layers");
  }
  for (std::size_t l = 0; l < wl; ++l) {
    const Matrix& w = weights_[l];
    if (w.rows != sizes_[l + 1] || w.cols != sizes_[l] || w.data.size() != w.rows * w.cols) {
      throw DimensionError("weight layer " + std::to_string(l + 2) + " must be " +
                           std::to_string(sizes_[l + 1]) + "x" + std::to_string(sizes_[l]));
    }
    if (biases_[l].size() != sizes_[l + 1]) {
      throw DimensionError("bias layer " + std::to_string(l + 2) + " must have " +
                           std::to_string(sizes_[l + 1]) + " entries");
    }
    if (!all_finite(w.data) || !all_finite(biases_[l])) {
      throw InvalidInput("layer " + std::to_string(l + 2) + " has non-finite parameters");
    }
  }
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].data.size() + biases_[l].size();
  return n;
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidInput("beta must lie in [0, 1]");
  if (epochs == 0) throw InvalidInput("epochs must be positive");
}

MomentumState MomentumState::zeros_like(const Network& net) {
  MomentumState m;
  for (std::size_t l = 0; l < net.weight_layer_count(); ++l) {
    m.weight_steps.emplace_back(net.weights(l).data.size(), 0.0);
    m.bias_steps.emplace_back(net.biases(l).size(), 0.0);
  }
  return m;
}

bool MomentumState::congruent_with(const Network& net) const {
  if (weight_steps.size() != net.weight_layer_count() || bias_steps.size() != weight_steps.size()) {
    return false;
  }
  for (std::size_t l = 0; l < weight_steps.size(); ++l) {
    if (weight_steps[l].size() != net.weights(l).data.size() ||
        bias_steps[l].size() != net.biases(l).size()) {
      return false;
    }
  }
  return true;
}

Network init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  std::vector<std::size_t> sizes(layer_sizes.begin(), layer_sizes.end());
  check_topology(sizes);
  Rng rng(seed);
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double r = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
    Matrix w(sizes[l + 1], sizes[l]);
    for (double& x : w.data) x = rng.uniform(-r, r);
    weights.push_back(std::move(w));
    biases.emplace_back(sizes[l + 1], 0.0);
  }
  return Network(std::move(sizes), std::move(weights), std::move(biases), Provenance{seed, 0, 0.0, 0.0});
}

double activate(double v) noexcept { return 1.0 / (1.0 + std::exp(-v)); }

double activate_derivative(double y) noexcept { return y * (1.0 - y); }

ForwardTrace forward(const Network& net, std::span<const double> input) {
  if (input.size() != net.input_width()) {
    throw DimensionError("input has " + std::to_string(input.size()) + " values, network expects " +
                         std::to_string(net.input_width()));
  }
  ForwardTrace trace;
  forward_into(net, input, trace);
  return trace;
}

std::vector<double> infer(const Network& net, std::span<const double> input) {
  if (input.size() != net.input_width()) {
    throw DimensionError("input has " + std::to_string(input.size()) + " values, network expects " +
                         std::to_string(net.input_width()));
  }
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < net.weight_layer_count(); ++l) {
    const Matrix& w = net.weights(l);
    const std::vector<double>& b = net.biases(l);
    next.resize(w.rows);
    for (std::size_t k = 0; k < w.rows; ++k) {
      const double* row = w.data.data() + k * w.cols;
      double sum = b[k];
      for (std::size_t j = 0; j < w.cols; ++j) sum += row[j] * cur[j];
      next[k] = activate(sum);
    }
    cur.swap(next);
  }
  return cur;
}

double loss(std::span<const double> output, std::span<const double> target) {
  if (output.size() != target.size()) {
    throw DimensionError("loss over " + std::to_string(output.size()) + " outputs and " +
                         std::to_string(target.size()) + " targets");
  }
  double e = 0.0;
  for (std::size_t k = 0; k < output.size(); ++k) {
    const double r = target[k] - output[k];
    e += r * r;
  }
  return 0.5 * e;
}

Deltas backprop_deltas(const Network& net, const ForwardTrace& trace, std::span<const double> target) {
  check_trace(net, trace);
  if (target.size() != net.output_width()) {
    throw DimensionError("target has " + std::to_string(target.size()) + " values, network outputs " +
                         std::to_string(net.output_width()));
  }
  Deltas deltas;
  deltas_into(net, trace, target, deltas);
  return deltas;
}

void apply_update(Network& net, const Deltas& deltas, const ForwardTrace& trace,
                  const TrainConfig& config, MomentumState& momentum) {
  check_trace(net, trace);
  if (deltas.size() != net.weight_layer_count()) throw DimensionError("delta layer count mismatch");
  if (!momentum.congruent_with(net)) throw DimensionError("momentum state does not match network");
  const double alpha = config.alpha;
  const double beta = config.beta;
  for (std::size_t l = 0; l < net.weight_layer_count(); ++l) {
    const std::size_t rows = net.weights(l).rows;
    const std::size_t cols = net.weights(l).cols;
    if (deltas[l].size() != rows) throw DimensionError("delta width mismatch");
    std::span<double> w = net.weight_data(l);
    std::span<double> b = net.bias_data(l);
    std::vector<double>& w_step = momentum.weight_steps[l];
    std::vector<double>& b_step = momentum.bias_steps[l];
    const std::vector<double>& y_prev = trace.activations[l];
    for (std::size_t k = 0; k < rows; ++k) {
      const double ad = alpha * deltas[l][k];
      for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t idx = k * cols + j;
        const double step = ad * y_prev[j] + beta * w_step[idx];
        w[idx] += step;
        w_step[idx] = step;
      }
      const double step = ad + beta * b_step[k];
      b[k] += step;
      b_step[k] = step;
    }
  }
}

TrainResult train(Network& net, const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw InvalidInput("training set is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].input.size() != net.input_width() || data[i].target.size() != net.output_width()) {
      throw InvalidInput("training pair " + std::to_string(i) + " does not match the network shape");
    }
  }

  Rng rng(config.seed);
  MomentumState momentum = MomentumState::zeros_like(net);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ForwardTrace trace;
  Deltas deltas;
  TrainResult result;
  result.loss_history.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t idx : order) {
      const Sample& s = data[idx];
      forward_into(net, s.input, trace);
      total += loss(trace.output(), s.target);
      deltas_into(net, trace, s.target, deltas);
      apply_update(net, deltas, trace, config, momentum);
    }
    const double mean = total / static_cast<double>(data.size());
    if (!std::isfinite(mean)) {
      throw TrainingDiverged(epoch, "training diverged at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(mean);
  }

  Provenance& p = net.provenance();
  p.trained_epochs += config.epochs;
  p.alpha = config.alpha;
  p.beta = config.beta;
  return result;
}

GradCheckResult grad_check(const Network& net, std::span<const double> input,
                           std::span<const double> target, double h, double absolute_floor) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const ForwardTrace trace = forward(net, input);
  const Deltas deltas = backprop_deltas(net, trace, target);

  GradCheckResult result;
  Network probe = net;
  auto loss_at = [&](const Network& n) { return loss(infer(n, input), target); };
  auto compare = [&](double analytic, double numeric) {
    const double abs_err = std::abs(analytic - numeric);
    result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
    if (abs_err > absolute_floor) {
      const double scale = std::max(std::abs(analytic), std::abs(numeric));
      result.max_relative_error = std::max(result.max_relative_error, abs_err / scale);
    }
    ++result.parameters_checked;
  };
  auto central = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = loss_at(probe);
    param = saved - h;
    const double down = loss_at(probe);
    param = saved;
    return (up - down) / (2.0 * h);
  };

  for (std::size_t l = 0; l < net.weight_layer_count(); ++l) {
    const std::size_t cols = net.weights(l).cols;
    std::span<double> w = probe.weight_data(l);
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
      // dE/dW = -delta_k * y_j
      const double analytic = -deltas[l][idx / cols] * trace.activations[l][idx % cols];
      compare(analytic, central(w[idx]));
    }
    std::span<double> b = probe.bias_data(l);
    for (std::size_t k = 0; k < b.size(); ++k) compare(-deltas[l][k], central(b[k]));
  }
  return result;
}

}  // namespace glovespot::mlp
