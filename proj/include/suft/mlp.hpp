#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "suft/rng.hpp"

namespace suft {

enum class Activation : uint8_t { ReLU = 0, Tanh = 1 };

// Feed-forward network with an explicit flat parameter vector. Layout per
// layer: weight matrix (out x in, row-major) followed by the bias vector.
// Hidden layers use the configured activation; the output layer is linear.
struct Mlp {
  std::vector<int> layer_sizes;
  Activation activation = Activation::ReLU;
  std::vector<double> weights;

  int in_dim() const { return layer_sizes.front(); }
  int out_dim() const { return layer_sizes.back(); }
  size_t n_params() const;

  // He-style uniform init scaled by fan-in (weights +-sqrt(6/fan_in),
  // biases +-1/sqrt(fan_in)), deterministic per seed.
  static Mlp init(std::vector<int> layer_sizes, Activation activation,
                  uint64_t seed);
};

size_t mlp_param_count(const std::vector<int>& layer_sizes);

// Batch loss over the network outputs. Receives the outputs (batch-major,
// batch*n_out), must return the scalar batch loss and add d(loss)/d(outputs)
// into d_outputs (same shape, pre-zeroed by the caller).
using BatchLossFn =
    std::function<double(const double* outputs, int batch, int n_out,
                         double* d_outputs)>;

// Forward pass for one input vector.
std::vector<double> forward(const Mlp& net, const std::vector<double>& input);

// Forward pass for a batch (inputs batch-major, batch*in_dim).
std::vector<double> forward_batch(const Mlp& net,
                                  const std::vector<double>& inputs,
                                  int batch);

struct BackwardResult {
  double loss = 0.0;
  std::vector<double> grad;  // same length as net.weights
};

// Reverse-mode gradient of the batch loss with respect to every weight.
BackwardResult backward(const Mlp& net, const std::vector<double>& inputs,
                        int batch, const BatchLossFn& loss_fn);

struct GradCheckReport {
  double max_rel_err = 0.0;
  size_t worst_index = 0;
  bool passed = false;  // max_rel_err < 1e-5
};

// Central finite differences against the analytic gradient, coordinatewise.
// rel err = |g_a - g_n| / max(1, |g_a|, |g_n|). The loss must be smooth at
// the evaluation point (keep L1 residuals well clear of the kink, i.e.
// |residual| >= 10 h).
GradCheckReport grad_check(const Mlp& net, const std::vector<double>& inputs,
                           int batch, const BatchLossFn& loss_fn, double h);

struct AdamState {
  uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  static AdamState for_net(const Mlp& net) {
    AdamState s;
    s.m.assign(net.n_params(), 0.0);
    s.v.assign(net.n_params(), 0.0);
    return s;
  }
};

// Bias-corrected Adam update in place; increments state.step.
void adam_step(Mlp& net, const std::vector<double>& grad, AdamState& state,
               double lr);

Mlp clone_weights(const Mlp& net);
void copy_into_target(const Mlp& online, Mlp& target);

// Checkpoint file errors. parse_error carries the byte offset at which the
// file stopped making sense.
struct parse_error : std::runtime_error {
  size_t offset;
  parse_error(const std::string& msg, size_t offset_)
      : std::runtime_error(msg + " (byte offset " + std::to_string(offset_) +
                           ")"),
        offset(offset_) {}
};

struct version_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Little-endian binary checkpoint: magic "SUFTNN1", activation code (u8),
// layer count (u32), layer sizes (u32 each), then the flat f64 weight vector.
void save_weights(const Mlp& net, const std::string& path);
Mlp load_weights(const std::string& path);

}  // namespace suft
