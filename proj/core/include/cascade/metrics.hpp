#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/tree.hpp"

namespace cascade {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct ClassificationReport {
  double accuracy = 0.0;
  ClassMetrics class0;
  ClassMetrics class1;
  std::optional<double> auc;  // absent when only one class is present
};

/// AUC by the rank statistic: the probability that a random positive
/// outscores a random negative, ties counted half. Absent for single-class
/// label sets.
std::optional<double> auc_rank(const std::vector<int>& labels,
                               const std::vector<double>& scores);

ClassificationReport classification_report(const std::vector<int>& labels,
                                           const std::vector<int>& predictions,
                                           const std::vector<double>& scores);

struct ProfileCell {
  double accuracy = 0.0;
  std::int64_t count = 0;
};

struct ProfileEntry {
  std::int64_t axis_value = 0;
  bool correct = false;
};

/// Mean correctness per axis value (level or birth order).
std::map<std::int64_t, ProfileCell> accuracy_profile(std::span<const ProfileEntry> entries);

enum class Binning { Integer, Log2, Uniform };

struct Histogram {
  Binning binning = Binning::Integer;
  std::vector<double> edges;   // strictly increasing; bin i = [e[i], e[i+1])
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t clamped = 0;  // values forced into the first/last bin
};

std::vector<double> integer_edges(std::int64_t lo, std::int64_t hi);
std::vector<double> log2_edges(double max_value);
std::vector<double> uniform_edges(double lo, double hi, int bins);

Histogram histogram_of(std::span<const double> values, Binning binning,
                       std::vector<double> edges);

/// Base-2 Jensen-Shannon divergence of two identically binned histograms.
/// Ranges [0, 1]; zero-count bins contribute nothing.
double js_divergence(const Histogram& p, const Histogram& q);

struct TreeStats {
  std::int64_t size = 0;
  std::int64_t depth = 0;
  std::int64_t breadth = 0;
  double virality = 0.0;
};

TreeStats tree_stats(const CascadeTree& tree);

struct StructuralHistograms {
  Histogram size;       // log2 bins over [1, max]
  Histogram depth;      // integer bins
  Histogram breadth;    // log2 bins
  Histogram virality;   // 50 uniform bins over [0, max]
};

/// Histograms of the four structural properties. When `anchor` is given its
/// edges are reused so both sides bin identically (out-of-range values clamp
/// into the boundary bins).
StructuralHistograms structural_histograms(std::span<const TreeStats> stats,
                                           const StructuralHistograms* anchor = nullptr);
StructuralHistograms structural_histograms(std::span<const CascadeTree> trees,
                                           const StructuralHistograms* anchor = nullptr);

/// Continuous maximum-likelihood power-law exponent over observations
/// >= xmin. With discrete_correction, xmin is shifted by -0.5 (integer data
/// correction). min_observations guards against meaningless fits.
double power_law_alpha(std::span<const std::int64_t> sizes, std::int64_t xmin,
                       bool discrete_correction = true, std::size_t min_observations = 10);

}  // namespace cascade
