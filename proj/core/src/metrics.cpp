#include "cascade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascade/errors.hpp"

namespace cascade {

std::optional<double> auc_rank(const std::vector<int>& labels,
                               const std::vector<double>& scores) {
  if (labels.size() != scores.size()) {
    throw Error(ErrorCode::ShapeMismatch, "labels/scores length mismatch");
  }
  std::int64_t positives = 0, negatives = 0;
  for (int lab : labels) (lab == 1 ? positives : negatives)++;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<std::size_t> idx(labels.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of average ranks of the positives (Mann-Whitney U).
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum - 0.5 * static_cast<double>(positives) *
                                  static_cast<double>(positives + 1);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

ClassificationReport classification_report(const std::vector<int>& labels,
                                           const std::vector<int>& predictions,
                                           const std::vector<double>& scores) {
  if (labels.size() != predictions.size() || labels.size() != scores.size()) {
    throw Error(ErrorCode::ShapeMismatch, "labels/predictions/scores length mismatch");
  }
  if (labels.empty()) throw Error(ErrorCode::EmptyCorpus, "nothing to evaluate");

  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      (predictions[i] == 1 ? tp : fn)++;
    } else {
      (predictions[i] == 1 ? fp : tn)++;
    }
  }

  auto safe_div = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  ClassificationReport report;
  report.accuracy = safe_div(tp + tn, tp + tn + fp + fn);
  report.class1.precision = safe_div(tp, tp + fp);
  report.class1.recall = safe_div(tp, tp + fn);
  report.class1.support = tp + fn;
  report.class0.precision = safe_div(tn, tn + fn);
  report.class0.recall = safe_div(tn, tn + fp);
  report.class0.support = tn + fp;
  auto f1 = [](const ClassMetrics& m) {
    const double denom = m.precision + m.recall;
    return denom == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / denom;
  };
  report.class0.f1 = f1(report.class0);
  report.class1.f1 = f1(report.class1);
  report.auc = auc_rank(labels, scores);
  return report;
}

std::map<std::int64_t, ProfileCell> accuracy_profile(std::span<const ProfileEntry> entries) {
  std::map<std::int64_t, ProfileCell> profile;
  for (const auto& e : entries) {
    auto& cell = profile[e.axis_value];
    cell.accuracy += e.correct ? 1.0 : 0.0;
    cell.count++;
  }
  for (auto& [axis, cell] : profile) cell.accuracy /= static_cast<double>(cell.count);
  return profile;
}

std::vector<double> integer_edges(std::int64_t lo, std::int64_t hi) {
  std::vector<double> edges;
  for (std::int64_t v = lo; v <= hi + 1; ++v) edges.push_back(static_cast<double>(v));
  return edges;
}

std::vector<double> log2_edges(double max_value) {
  std::vector<double> edges{1.0};
  double edge = 1.0;
  while (edge <= max_value) {
    edge *= 2.0;
    edges.push_back(edge);
  }
  return edges;
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  if (hi <= lo) hi = lo + 1.0;
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  return edges;
}

Histogram histogram_of(std::span<const double> values, Binning binning,
                       std::vector<double> edges) {
  Histogram hist;
  hist.binning = binning;
  hist.edges = std::move(edges);
  hist.counts.assign(hist.edges.size() - 1, 0);
  for (double v : values) {
    auto it = std::upper_bound(hist.edges.begin(), hist.edges.end(), v);
    std::int64_t bin = static_cast<std::int64_t>(it - hist.edges.begin()) - 1;
    if (bin < 0) {
      bin = 0;
      hist.clamped++;
    } else if (bin >= static_cast<std::int64_t>(hist.counts.size())) {
      bin = static_cast<std::int64_t>(hist.counts.size()) - 1;
      // The top edge itself is included rather than clamped.
      if (v > hist.edges.back()) hist.clamped++;
    }
    hist.counts[static_cast<std::size_t>(bin)]++;
    hist.total++;
  }
  return hist;
}

double js_divergence(const Histogram& p, const Histogram& q) {
  if (p.edges != q.edges) throw Error(ErrorCode::BinningMismatch, "histogram edges differ");
  if (p.total == 0 || q.total == 0) {
    throw Error(ErrorCode::BinningMismatch, "empty histogram");
  }
  double js = 0.0;
  for (std::size_t i = 0; i < p.counts.size(); ++i) {
    const double pi = static_cast<double>(p.counts[i]) / static_cast<double>(p.total);
    const double qi = static_cast<double>(q.counts[i]) / static_cast<double>(q.total);
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) js += 0.5 * pi * std::log2(pi / mi);
    if (qi > 0.0) js += 0.5 * qi * std::log2(qi / mi);
  }
  return std::max(0.0, js);
}

TreeStats tree_stats(const CascadeTree& tree) {
  TreeStats s;
  s.size = tree.size();
  s.depth = tree.max_depth;
  s.breadth = max_breadth(tree);
  s.virality = structural_virality(tree);
  return s;
}

StructuralHistograms structural_histograms(std::span<const TreeStats> stats,
                                           const StructuralHistograms* anchor) {
  std::vector<double> sizes, depths, breadths, viralities;
  sizes.reserve(stats.size());
  for (const auto& s : stats) {
    sizes.push_back(static_cast<double>(s.size));
    depths.push_back(static_cast<double>(s.depth));
    breadths.push_back(static_cast<double>(s.breadth));
    viralities.push_back(s.virality);
  }

  StructuralHistograms out;
  if (anchor != nullptr) {
    out.size = histogram_of(sizes, Binning::Log2, anchor->size.edges);
    out.depth = histogram_of(depths, Binning::Integer, anchor->depth.edges);
    out.breadth = histogram_of(breadths, Binning::Log2, anchor->breadth.edges);
    out.virality = histogram_of(viralities, Binning::Uniform, anchor->virality.edges);
    return out;
  }

  auto max_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  };
  out.size = histogram_of(sizes, Binning::Log2, log2_edges(max_of(sizes)));
  out.depth = histogram_of(depths, Binning::Integer,
                           integer_edges(0, static_cast<std::int64_t>(max_of(depths))));
  out.breadth = histogram_of(breadths, Binning::Log2, log2_edges(max_of(breadths)));
  out.virality =
      histogram_of(viralities, Binning::Uniform, uniform_edges(0.0, max_of(viralities), 50));
  return out;
}

StructuralHistograms structural_histograms(std::span<const CascadeTree> trees,
                                           const StructuralHistograms* anchor) {
  std::vector<TreeStats> stats;
  stats.reserve(trees.size());
  for (const auto& tree : trees) stats.push_back(tree_stats(tree));
  return structural_histograms(stats, anchor);
}

double power_law_alpha(std::span<const std::int64_t> sizes, std::int64_t xmin,
                       bool discrete_correction, std::size_t min_observations) {
  if (xmin < 1) throw Error(ErrorCode::InvalidConfig, "xmin must be positive");
  const double x0 = discrete_correction ? static_cast<double>(xmin) - 0.5
                                        : static_cast<double>(xmin);
  double log_sum = 0.0;
  std::size_t n = 0;
  for (std::int64_t x : sizes) {
    if (x < xmin) continue;
    log_sum += std::log(static_cast<double>(x) / x0);
    ++n;
  }
  if (n < min_observations) {
    throw Error(ErrorCode::TooFewObservations,
                std::to_string(n) + " observations >= xmin, need " +
                    std::to_string(min_observations));
  }
  return 1.0 + static_cast<double>(n) / log_sum;
}

}  // namespace cascade
