#include "cascade/generative.hpp"

#include <algorithm>

#include "cascade/errors.hpp"

namespace cascade {

CandidateBlock generate_candidate(std::span<const SeedRoot> seeds,
                                  const ConditionalTables& tables, const FeatureSchema& schema,
                                  const GeneratorConfig& config, std::uint64_t base_seed,
                                  std::uint64_t trial) {
  CandidateBlock candidate;
  candidate.rng_seed = substream_seed(base_seed, trial);
  GeneratedBlock generated = generate_block(seeds, tables, schema, config, candidate.rng_seed);
  candidate.block = std::move(generated.block);
  candidate.stats.reserve(generated.cascades.size());
  for (const auto& cascade : generated.cascades) {
    candidate.stats.push_back(tree_stats(cascade.tree));
  }
  return candidate;
}

std::vector<CandidateBlock> generate_pool(std::span<const SeedRoot> seeds,
                                          const ConditionalTables& tables,
                                          const FeatureSchema& schema,
                                          const GeneratorConfig& config, int pool_size,
                                          std::uint64_t base_seed) {
  std::vector<CandidateBlock> pool;
  pool.reserve(pool_size);
  for (int trial = 0; trial < pool_size; ++trial) {
    pool.push_back(generate_candidate(seeds, tables, schema, config, base_seed,
                                      static_cast<std::uint64_t>(trial)));
  }
  return pool;
}

void score_block(const ModelParams& model, const NormalizationStats& stats,
                 CandidateBlock& candidate, Task task) {
  candidate.per_brick_auc.clear();
  candidate.per_brick_auc.reserve(candidate.block.bricks.size());
  double sum = 0.0;
  std::size_t present = 0;

  for (const auto& brick : candidate.block.bricks) {
    FeatureBrick prepared = brick;
    apply_normalization(prepared, candidate.block.schema, stats);
    mask_label_columns(prepared, candidate.block.schema, task);
    Prediction pred = predict(model, prepared);

    // Generated labels for the task, skipping absent ones.
    const auto& labels = task_labels(brick, task);
    std::vector<int> y;
    std::vector<double> s;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t] == kLabelAbsent) continue;
      y.push_back(labels[t]);
      s.push_back(pred.probs[t]);
    }
    std::optional<double> auc = y.empty() ? std::nullopt : auc_rank(y, s);
    if (auc) {
      sum += *auc;
      ++present;
    }
    candidate.per_brick_auc.push_back(auc);
  }
  candidate.mean_score =
      present > 0 ? std::optional<double>(sum / static_cast<double>(present)) : std::nullopt;
}

RankedPool rank_and_select(std::span<const CandidateBlock> pool) {
  if (pool.empty()) throw Error(ErrorCode::EmptyCorpus, "empty pool");
  bool any_scored = false;
  for (const auto& c : pool) any_scored = any_scored || c.mean_score.has_value();
  if (!any_scored) throw Error(ErrorCode::AllScoresAbsent, "no candidate has a mean score");

  RankedPool ranked;
  ranked.order.resize(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) ranked.order[i] = i;
  std::sort(ranked.order.begin(), ranked.order.end(), [&pool](std::size_t a, std::size_t b) {
    const auto& ca = pool[a];
    const auto& cb = pool[b];
    if (ca.mean_score.has_value() != cb.mean_score.has_value()) {
      return ca.mean_score.has_value();
    }
    if (ca.mean_score.has_value() && *ca.mean_score != *cb.mean_score) {
      return *ca.mean_score > *cb.mean_score;
    }
    return ca.rng_seed < cb.rng_seed;
  });
  ranked.best = ranked.order.front();
  ranked.median = ranked.order[(ranked.order.size() - 1) / 2];
  ranked.lowest = ranked.order.back();
  return ranked;
}

DivergenceReport evaluate_selection(const CandidateBlock& selected,
                                    std::span<const TreeStats> ground_truth) {
  if (ground_truth.empty()) throw Error(ErrorCode::EmptyCorpus, "no ground-truth trees");
  StructuralHistograms gt = structural_histograms(ground_truth);
  StructuralHistograms gen = structural_histograms(std::span<const TreeStats>(selected.stats), &gt);

  DivergenceReport report;
  report.js_size = js_divergence(gt.size, gen.size);
  report.js_depth = js_divergence(gt.depth, gen.depth);
  report.js_breadth = js_divergence(gt.breadth, gen.breadth);
  report.js_virality = js_divergence(gt.virality, gen.virality);
  return report;
}

}  // namespace cascade
