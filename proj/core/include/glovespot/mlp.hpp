#pragma once

// Feedforward sigmoid network trained by per-pattern backpropagation with
// momentum. Layers are numbered 1..n as usual for these networks; internally
// the weight layers are indexed from 0, so weight layer `l` maps layer l+1
// onto layer l+2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace glovespot::mlp {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

/// Where a network came from and how much training it has seen.
struct Provenance {
  std::uint64_t seed = 0;
  std::size_t trained_epochs = 0;
  double alpha = 0.0;
  double beta = 0.0;

  bool operator==(const Provenance&) const = default;
};

class Network {
 public:
  /// Throws InvalidTopology when there are fewer than three layers or a zero
  /// width, DimensionError when the parameter shapes disagree with the sizes,
  /// and InvalidInput on non-finite parameters.
  Network(std::vector<std::size_t> layer_sizes, std::vector<Matrix> weights,
          std::vector<std::vector<double>> biases, Provenance provenance = {});

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t layer_count() const noexcept { return sizes_.size(); }
  std::size_t weight_layer_count() const noexcept { return weights_.size(); }
  std::size_t input_width() const noexcept { return sizes_.front(); }
  std::size_t output_width() const noexcept { return sizes_.back(); }
  std::size_t parameter_count() const noexcept;

  const Matrix& weights(std::size_t l) const { return weights_.at(l); }
  const std::vector<double>& biases(std::size_t l) const { return biases_.at(l); }

  // Mutable views keep the shapes fixed.
  std::span<double> weight_data(std::size_t l) { return weights_.at(l).data; }
  std::span<double> bias_data(std::size_t l) { return biases_.at(l); }

  const Provenance& provenance() const noexcept { return provenance_; }
  Provenance& provenance() noexcept { return provenance_; }

  bool operator==(const Network&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Matrix> weights_;
  std::vector<std::vector<double>> biases_;
  Provenance provenance_;
};

/// Local fields and activations of every layer for one input.
/// `fields[0]` is empty and `activations[0]` is the input itself.
struct ForwardTrace {
  std::vector<std::vector<double>> fields;
  std::vector<std::vector<double>> activations;

  const std::vector<double>& output() const { return activations.back(); }
};

/// Delta vectors for every non-input layer; `deltas[l]` belongs to weight layer l.
using Deltas = std::vector<std::vector<double>>;

struct TrainConfig {
  double alpha = 0.1;  ///< learning rate, in [0, 1]
  double beta = 0.1;   ///< momentum, in [0, 1]
  std::size_t epochs = 10000;
  std::uint64_t seed = 0;
  bool shuffle = true;

  /// Throws InvalidInput when alpha/beta leave [0, 1] or epochs is zero.
  void validate() const;
};

/// Previous total step of every weight and bias (zero before the first update).
struct MomentumState {
  std::vector<std::vector<double>> weight_steps;
  std::vector<std::vector<double>> bias_steps;

  static MomentumState zeros_like(const Network& net);
  bool congruent_with(const Network& net) const;
};

struct Sample {
  std::vector<double> input;
  std::vector<double> target;
};

using Dataset = std::vector<Sample>;

struct TrainResult {
  std::vector<double> loss_history;  ///< mean per-pattern loss, one entry per epoch
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t parameters_checked = 0;
};

/// Uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
Network init_network(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

double activate(double v) noexcept;

/// Derivative of the sigmoid expressed through its output y = activate(v).
double activate_derivative(double y) noexcept;

ForwardTrace forward(const Network& net, std::span<const double> input);

/// Output layer only; avoids building a full trace.
std::vector<double> infer(const Network& net, std::span<const double> input);

/// Half the sum of squared residuals.
double loss(std::span<const double> output, std::span<const double> target);

Deltas backprop_deltas(const Network& net, const ForwardTrace& trace,
                       std::span<const double> target);

/// Adds alpha*delta*y plus beta times the previous step to every parameter and
/// records the applied step in `momentum`.
void apply_update(Network& net, const Deltas& deltas, const ForwardTrace& trace,
                  const TrainConfig& config, MomentumState& momentum);

/// Runs `config.epochs` epochs of online updates. Throws InvalidInput on an
/// empty or inconsistent dataset and TrainingDiverged when an epoch's mean
/// loss is not finite.
TrainResult train(Network& net, const Dataset& data, const TrainConfig& config);

/// Compares backprop gradients with central finite differences of the loss
/// over every weight and bias. Differences below `absolute_floor` count as
/// exact agreement.
GradCheckResult grad_check(const Network& net, std::span<const double> input,
                           std::span<const double> target, double h = 1e-5,
                           double absolute_floor = 1e-8);

}  // namespace glovespot::mlp
