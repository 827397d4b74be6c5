#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cascade/lstm.hpp"

namespace cascade {

struct TrainConfig {
  int epochs = 40;
  int bptt_cap = 500;
  std::uint64_t shuffle_seed = 1;
  int patience = 0;  // 0 = no early stopping, run all epochs
  AdamConfig adam;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean BCE per labeled step over the epoch
  std::optional<double> val_accuracy;
};

struct TrainResult {
  ModelParams model;
  std::vector<EpochStats> trace;
  int best_epoch = -1;  // set when early stopping was active
};

/// Per-task labels of one brick.
const std::vector<int>& task_labels(const FeatureBrick& brick, Task task);

/// Fraction of correctly predicted labeled steps over a block.
double block_accuracy(const ModelParams& model, const Block& block);

/// Batch-size-1 training: one Adam update per brick, brick order reshuffled
/// every epoch from shuffle_seed. Bricks with no labeled step are skipped.
/// With patience > 0 (validation required) the best-validation-epoch
/// parameters are returned; otherwise the final ones.
TrainResult train(ModelParams model, const std::vector<const Block*>& training,
                  const TrainConfig& config, const Block* validation = nullptr);

}  // namespace cascade
