#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cascade/generator.hpp"
#include "cascade/lstm.hpp"
#include "cascade/metrics.hpp"

namespace cascade {

/// One generated candidate block with its per-brick model scores. Tree
/// structure is kept as summary stats; the full block is reproducible from
/// rng_seed.
struct CandidateBlock {
  Block block;
  std::vector<TreeStats> stats;
  std::uint64_t rng_seed = 0;
  std::vector<std::optional<double>> per_brick_auc;
  std::optional<double> mean_score;
};

/// Generates pool_size candidate blocks, one rng substream per trial index.
/// Scores are left unset.
std::vector<CandidateBlock> generate_pool(std::span<const SeedRoot> seeds,
                                          const ConditionalTables& tables,
                                          const FeatureSchema& schema,
                                          const GeneratorConfig& config, int pool_size,
                                          std::uint64_t base_seed);

CandidateBlock generate_candidate(std::span<const SeedRoot> seeds,
                                  const ConditionalTables& tables, const FeatureSchema& schema,
                                  const GeneratorConfig& config, std::uint64_t base_seed,
                                  std::uint64_t trial);

/// Scores one candidate: per brick, normalize with the training stats, mask
/// the task's label columns, predict, then AUC of the model scores against
/// the generated labels. Single-class bricks get no AUC; mean_score averages
/// the present ones.
void score_block(const ModelParams& model, const NormalizationStats& stats,
                 CandidateBlock& candidate, Task task);

struct RankedPool {
  std::vector<std::size_t> order;  // candidate indices, best first
  std::size_t best = 0;
  std::size_t median = 0;  // order[(count-1)/2]
  std::size_t lowest = 0;
};

/// Descending by mean_score, ties by rng_seed ascending; scoreless
/// candidates sort last. Throws AllScoresAbsent when nothing is scored.
RankedPool rank_and_select(std::span<const CandidateBlock> pool);

struct DivergenceReport {
  double js_size = 0.0;
  double js_depth = 0.0;
  double js_breadth = 0.0;
  double js_virality = 0.0;
};

/// Four JS divergences between a candidate's structural histograms and the
/// ground truth's, binning anchored to the ground truth.
DivergenceReport evaluate_selection(const CandidateBlock& selected,
                                    std::span<const TreeStats> ground_truth);

}  // namespace cascade
