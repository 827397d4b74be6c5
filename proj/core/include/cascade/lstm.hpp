#pragma once

#include <cstdint>
#include <vector>

#include "cascade/features.hpp"

namespace cascade {

/// Gate index order used throughout the flat parameter layout.
enum Gate { kInput = 0, kForget = 1, kCandidate = 2, kOutput = 3 };

/// Two stacked LSTM layers plus a per-step sigmoid head, stored as one flat
/// parameter vector. Per layer the layout is W[4] (H x I, row-major), U[4]
/// (H x H), b[4] (H); then the second layer; then head weights (H2) and the
/// head bias. The flat form is what Adam, serialization and the
/// finite-difference checks all operate on.
struct ModelParams {
  int input_size = 0;
  int hidden1 = 32;
  int hidden2 = 8;
  Task task = Task::Branch;
  std::vector<double> theta;

  std::size_t param_count() const;
  std::size_t layer_offset(int layer) const;  // 0 or 1
  std::size_t head_offset() const;
};

std::size_t lstm_layer_param_count(int input_size, int hidden_size);

/// Glorot-uniform weights, zero biases except forget-gate bias = 1.
ModelParams init_model(int input_size, int hidden1, int hidden2, Task task,
                       std::uint64_t seed);

struct LayerCache {
  // All steps x H, row per step.
  std::vector<double> gate_i, gate_f, gate_g, gate_o;
  std::vector<double> cell, tanh_cell, hidden;
};

struct ForwardCache {
  int steps = 0;
  LayerCache l1, l2;
  std::vector<double> logits;
  std::vector<double> probs;
};

/// Runs the stacked recurrence over one brick's rows (initial states zero)
/// and keeps every activation for BPTT.
ForwardCache forward(const ModelParams& model, const double* rows, int n_rows, int n_cols);
ForwardCache forward(const ModelParams& model, const FeatureBrick& brick);

constexpr double kProbClamp = 1e-7;

/// Mean binary cross-entropy over steps whose label is present
/// (kLabelAbsent entries are excluded). Probabilities are clamped to
/// [1e-7, 1 - 1e-7] before the logs.
double bce_loss(const std::vector<double>& probs, const std::vector<int>& labels);

/// Exact gradient of bce_loss via backpropagation through time. Sequences
/// longer than bptt_cap are split into contiguous windows: the forward state
/// carries across but gradients stop at window edges.
std::vector<double> backward(const ModelParams& model, const ForwardCache& cache,
                             const double* rows, const std::vector<int>& labels,
                             int bptt_cap = 500);

struct Prediction {
  std::vector<double> probs;
  std::vector<int> labels;  // 1 iff p > 0.5
};

Prediction predict(const ModelParams& model, const FeatureBrick& brick);

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  std::int64_t step = 0;

  explicit AdamState(std::size_t n, AdamConfig cfg = {})
      : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// Standard bias-corrected Adam update, elementwise over the flat vector.
void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& state);

}  // namespace cascade
