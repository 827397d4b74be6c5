#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cascade/tree.hpp"

namespace cascade {

enum class ColumnSource { Cascade, User, Content };
enum class Lineage { Self, Parent, Grandparent, Root };

/// Structural node fields a cascade column can read.
enum class CascadeField { Degree, ShortDelay, LongDelay, Level, BirthOrder };

/// One brick column. Cascade columns read a structural field of the lineage
/// target node; user/content columns read a named EventRecord attribute of it.
struct ColumnSpec {
  std::string name;
  ColumnSource source = ColumnSource::Cascade;
  Lineage lineage = Lineage::Self;
  std::optional<CascadeField> field;  // set for cascade columns
  std::string attr;                   // set for user/content columns
};

struct FeatureSchema {
  std::string platform_profile;
  std::vector<ColumnSpec> columns;

  int num_columns() const { return static_cast<int>(columns.size()); }
  int column_index(const std::string& name) const;  // -1 when absent
};

/// Built-in profiles: "reddit", "github", "synthetic". All carry the nine
/// cascade columns; user/content columns differ per platform.
FeatureSchema schema_for_profile(const std::string& profile);

constexpr double kLineageSentinel = -1.0;    // structural absence, raw
constexpr double kNormalizedSentinel = -3.0; // structural absence, post-scaling
constexpr int kLabelAbsent = -1;

/// 2-D per-cascade feature matrix: one row per node in chronological order.
struct FeatureBrick {
  std::string cascade_id;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<double> rows;           // row-major n_rows x n_cols
  std::vector<int> labels_branch;     // 0/1
  std::vector<int> labels_speed;      // 0/1, kLabelAbsent for the root

  double at(int r, int c) const { return rows[static_cast<std::size_t>(r) * n_cols + c]; }
  double& at(int r, int c) { return rows[static_cast<std::size_t>(r) * n_cols + c]; }
};

struct ColumnStats {
  std::string name;
  double mean = 0.0;
  double stddev = 1.0;
};

struct NormalizationStats {
  std::vector<ColumnStats> columns;
};

/// Multi-cascade container; all bricks share one schema.
struct Block {
  FeatureSchema schema;
  std::vector<FeatureBrick> bricks;
  std::optional<NormalizationStats> normalization;
  std::uint64_t rng_seed = 0;  // generation provenance, 0 = not generated

  std::size_t total_rows() const;
};

using AttributeLookup = std::function<const EventRecord*(const std::string& event_id)>;

/// Builds the brick for one annotated tree. Lineage columns copy the target
/// ancestor's value; rows missing that ancestor (root / levels 0-1) get the
/// -1 sentinel. A user/content column whose attribute is missing on an
/// existing target node is a SchemaMismatch.
FeatureBrick brick_from_tree(const CascadeTree& tree, const FeatureSchema& schema,
                             const AttributeLookup& lookup);

/// Branch labels in chronological order: 1 iff degree > 0.
std::vector<int> derive_branch_labels(const CascadeTree& tree);

/// Speed labels: absent for the root; 1 iff short_delay > median of the
/// cascade's non-root short delays (ties are early / class 0).
std::vector<int> derive_speed_labels(const CascadeTree& tree);

/// Per-column mean and population stddev over all bricks; -1 entries of
/// lineage columns are excluded; a constant column reports stddev 1.
NormalizationStats fit_normalization(const Block& block);

/// z-scores every non-sentinel entry in place; lineage sentinels become -3.
void apply_normalization(Block& block, const NormalizationStats& stats);
void apply_normalization(FeatureBrick& brick, const FeatureSchema& schema,
                         const NormalizationStats& stats);

enum class Task { Branch, Speed };

const char* task_name(Task task);
Task task_from_name(const std::string& name);

/// Names of the columns a task's label can be read off directly:
/// node_degree for branch; node_short_delay and node_long_delay for speed.
std::vector<std::string> label_columns(Task task);

/// Zero-masks the label-revealing columns of a normalized brick. Idempotent;
/// labels are untouched. Used both when scoring generated bricks and when
/// training/evaluating the classifier.
void mask_label_columns(FeatureBrick& brick, const FeatureSchema& schema, Task task);

}  // namespace cascade
