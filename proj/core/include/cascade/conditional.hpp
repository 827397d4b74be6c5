#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cascade/features.hpp"
#include "cascade/rng.hpp"
#include "cascade/tree.hpp"

namespace cascade {

/// Empirical value histogram: observed value -> count.
using ValueHist = std::map<double, std::uint64_t>;

std::uint64_t hist_total(const ValueHist& hist);

/// Empirical conditional distribution of one target quantity keyed by a
/// conditioning attribute. No smoothing; unseen keys fall back to the global
/// histogram (the pointwise sum over all keys).
struct ConditionalTable {
  std::string target;     // "degree" | "speed_class" | "delay" | attribute name
  std::string condition;  // "level" | "birth_order" | "size_bucket"
  std::map<std::int64_t, ValueHist> by_key;
  ValueHist fallback;

  const ValueHist& hist_for(std::int64_t key) const;
  /// Draws a value proportionally to counts for the key (fallback when
  /// unseen). Consumes exactly one rng word per call.
  double sample(std::int64_t key, Rng& rng) const;
  /// Probability that the drawn value would be > 0 for this key.
  double prob_positive(std::int64_t key) const;
};

struct ConditionalTables {
  std::vector<ConditionalTable> tables;

  const ConditionalTable* find(const std::string& target, const std::string& condition) const;
  const ConditionalTable& require(const std::string& target, const std::string& condition) const;
};

/// Delay conditioning key: floor(log2(size)).
std::int64_t size_bucket(std::int64_t size);

/// Fits the empirical conditional distributions over a training corpus:
/// degree|level, degree|birth_order, speed_class|level,
/// speed_class|birth_order, delay|size_bucket, and attr|level for every
/// attribute-backed self column of the schema.
ConditionalTables fit_conditionals(std::span<const CascadeTree> trees,
                                   const FeatureSchema& schema,
                                   const AttributeLookup& lookup);

/// Draws a value from one histogram proportionally to counts.
double sample_hist(const ValueHist& hist, Rng& rng);

enum class BaselineScenario { DegreeLevel, DegreeBirthOrder, SpeedLevel, SpeedBirthOrder };

const char* baseline_scenario_name(BaselineScenario s);

struct BaselinePrediction {
  int label = 0;
  double score = 0.0;  // class-1 probability under the conditioned histogram
};

/// The four baseline predictors: draw a degree (label = degree > 0) or a
/// speed class, conditioned on the node's level or birth order.
BaselinePrediction baseline_predict(int level, int birth_order, BaselineScenario scenario,
                                    const ConditionalTables& tables, Rng& rng);

}  // namespace cascade
