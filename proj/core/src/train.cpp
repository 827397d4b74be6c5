#include "cascade/train.hpp"

#include <cmath>

#include "cascade/errors.hpp"
#include "cascade/rng.hpp"

namespace cascade {

const std::vector<int>& task_labels(const FeatureBrick& brick, Task task) {
  return task == Task::Branch ? brick.labels_branch : brick.labels_speed;
}

double block_accuracy(const ModelParams& model, const Block& block) {
  std::size_t correct = 0, total = 0;
  for (const auto& brick : block.bricks) {
    const auto& labels = task_labels(brick, model.task);
    Prediction pred = predict(model, brick);
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t] == kLabelAbsent) continue;
      correct += pred.labels[t] == labels[t];
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainResult train(ModelParams model, const std::vector<const Block*>& training,
                  const TrainConfig& config, const Block* validation) {
  if (config.epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (config.patience > 0 && validation == nullptr) {
    throw Error(ErrorCode::InvalidConfig, "early stopping needs a validation block");
  }

  std::vector<const FeatureBrick*> bricks;
  for (const Block* block : training) {
    for (const auto& brick : block->bricks) {
      if (brick.n_cols != model.input_size) {
        throw Error(ErrorCode::ShapeMismatch, "training brick width != model input size");
      }
      bricks.push_back(&brick);
    }
  }
  if (bricks.empty()) throw Error(ErrorCode::EmptyCorpus, "no training bricks");

  TrainResult result;
  AdamState adam(model.theta.size(), config.adam);
  std::vector<double> best_theta;
  double best_val = -1.0;
  int epochs_since_improvement = 0;

  std::vector<std::size_t> order(bricks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(substream_seed(config.shuffle_seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t labeled_steps = 0;
    for (std::size_t idx : order) {
      const FeatureBrick& brick = *bricks[idx];
      const auto& labels = task_labels(brick, model.task);
      std::size_t present = 0;
      for (int lab : labels) present += lab != kLabelAbsent;
      if (present == 0) continue;

      ForwardCache cache = forward(model, brick);
      loss_sum += bce_loss(cache.probs, labels) * static_cast<double>(present);
      labeled_steps += present;
      std::vector<double> grad =
          backward(model, cache, brick.rows.data(), labels, config.bptt_cap);
      adam_step(model.theta, grad, adam);

      for (double p : cache.probs) {
        if (!std::isfinite(p)) throw Error(ErrorCode::ShapeMismatch, "non-finite probability");
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = labeled_steps > 0 ? loss_sum / static_cast<double>(labeled_steps) : 0.0;
    if (validation != nullptr) stats.val_accuracy = block_accuracy(model, *validation);
    result.trace.push_back(stats);

    if (config.patience > 0) {
      const double val = *stats.val_accuracy;
      if (val > best_val) {
        best_val = val;
        best_theta = model.theta;
        result.best_epoch = epoch;
        epochs_since_improvement = 0;
      } else if (++epochs_since_improvement >= config.patience) {
        break;
      }
    }
  }

  if (config.patience > 0 && !best_theta.empty()) model.theta = std::move(best_theta);
  result.model = std::move(model);
  return result;
}

}  // namespace cascade
