#include "cascade/features.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

ColumnSpec cascade_col(const std::string& name, Lineage lineage, CascadeField field) {
  ColumnSpec c;
  c.name = name;
  c.source = ColumnSource::Cascade;
  c.lineage = lineage;
  c.field = field;
  return c;
}

ColumnSpec attr_col(const std::string& name, ColumnSource source, Lineage lineage,
                    const std::string& attr) {
  ColumnSpec c;
  c.name = name;
  c.source = source;
  c.lineage = lineage;
  c.attr = attr;
  return c;
}

// The nine cascade columns every profile carries.
void append_cascade_columns(std::vector<ColumnSpec>& cols) {
  cols.push_back(cascade_col("node_degree", Lineage::Self, CascadeField::Degree));
  cols.push_back(cascade_col("node_short_delay", Lineage::Self, CascadeField::ShortDelay));
  cols.push_back(cascade_col("node_long_delay", Lineage::Self, CascadeField::LongDelay));
  cols.push_back(cascade_col("node_level", Lineage::Self, CascadeField::Level));
  cols.push_back(cascade_col("node_birth_order", Lineage::Self, CascadeField::BirthOrder));
  cols.push_back(cascade_col("p_node_degree", Lineage::Parent, CascadeField::Degree));
  cols.push_back(cascade_col("p_node_birth_order", Lineage::Parent, CascadeField::BirthOrder));
  cols.push_back(cascade_col("gp_node_degree", Lineage::Grandparent, CascadeField::Degree));
  cols.push_back(cascade_col("gp_node_birth_order", Lineage::Grandparent, CascadeField::BirthOrder));
}

}  // namespace

int FeatureSchema::column_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
    if (columns[i].name == name) return i;
  }
  return -1;
}

FeatureSchema schema_for_profile(const std::string& profile) {
  FeatureSchema schema;
  schema.platform_profile = profile;
  auto& cols = schema.columns;
  append_cascade_columns(cols);

  if (profile == "reddit") {
    cols.push_back(attr_col("node_author_past_no_comments", ColumnSource::User, Lineage::Self,
                            "node_author_past_no_comments"));
    cols.push_back(attr_col("node_author_past_score", ColumnSource::User, Lineage::Self,
                            "node_author_past_score"));
    cols.push_back(attr_col("node_author_past_no_acts", ColumnSource::User, Lineage::Self,
                            "node_author_past_no_acts"));
    for (const char* base : {"comment_score", "comment_subjectivity", "comment_controversiality"}) {
      cols.push_back(attr_col(base, ColumnSource::Content, Lineage::Self, base));
      cols.push_back(attr_col(std::string("p_") + base, ColumnSource::Content, Lineage::Parent, base));
      cols.push_back(attr_col(std::string("gp_") + base, ColumnSource::Content, Lineage::Grandparent, base));
    }
  } else if (profile == "github") {
    cols.push_back(attr_col("node_author_age", ColumnSource::User, Lineage::Self, "node_author_age"));
    cols.push_back(attr_col("p_node_author_age", ColumnSource::User, Lineage::Parent, "node_author_age"));
    cols.push_back(attr_col("gp_node_author_age", ColumnSource::User, Lineage::Grandparent, "node_author_age"));
    cols.push_back(attr_col("root_node_author_age", ColumnSource::User, Lineage::Root, "node_author_age"));
    cols.push_back(attr_col("node_author_influence_score", ColumnSource::User, Lineage::Self,
                            "node_author_influence_score"));
    cols.push_back(attr_col("node_author_public_repos", ColumnSource::User, Lineage::Self,
                            "node_author_public_repos"));
    cols.push_back(attr_col("node_author_no_followers", ColumnSource::User, Lineage::Self,
                            "node_author_no_followers"));
    cols.push_back(attr_col("node_author_no_following", ColumnSource::User, Lineage::Self,
                            "node_author_no_following"));
    for (const char* base : {"repo_open_issue_count", "repo_no_watchers"}) {
      cols.push_back(attr_col(base, ColumnSource::Content, Lineage::Self, base));
      cols.push_back(attr_col(std::string("p_") + base, ColumnSource::Content, Lineage::Parent, base));
      cols.push_back(attr_col(std::string("gp_") + base, ColumnSource::Content, Lineage::Grandparent, base));
      cols.push_back(attr_col(std::string("root_") + base, ColumnSource::Content, Lineage::Root, base));
    }
  } else if (profile == "synthetic") {
    cols.push_back(attr_col("sentiment", ColumnSource::Content, Lineage::Self, "sentiment"));
    cols.push_back(attr_col("p_sentiment", ColumnSource::Content, Lineage::Parent, "sentiment"));
  } else {
    throw Error(ErrorCode::SchemaMismatch, "unknown platform profile '" + profile + "'");
  }
  return schema;
}

std::size_t Block::total_rows() const {
  std::size_t n = 0;
  for (const auto& b : bricks) n += static_cast<std::size_t>(b.n_rows);
  return n;
}

namespace {

// Arena index of the lineage target for node i, or -1 when absent.
int lineage_target(const CascadeTree& tree, int i, Lineage lineage) {
  switch (lineage) {
    case Lineage::Self: return i;
    case Lineage::Parent: return tree.nodes[i].parent;
    case Lineage::Grandparent: {
      int p = tree.nodes[i].parent;
      return p < 0 ? -1 : tree.nodes[p].parent;
    }
    case Lineage::Root: return 0;
  }
  return -1;
}

double cascade_field_value(const CascadeNode& node, CascadeField field) {
  switch (field) {
    case CascadeField::Degree: return static_cast<double>(node.degree);
    case CascadeField::ShortDelay: return static_cast<double>(node.short_delay);
    case CascadeField::LongDelay: return static_cast<double>(node.long_delay);
    case CascadeField::Level: return static_cast<double>(node.level);
    case CascadeField::BirthOrder: return static_cast<double>(node.birth_order);
  }
  return 0.0;
}

}  // namespace

FeatureBrick brick_from_tree(const CascadeTree& tree, const FeatureSchema& schema,
                             const AttributeLookup& lookup) {
  FeatureBrick brick;
  brick.cascade_id = tree.cascade_id();
  brick.n_rows = tree.size();
  brick.n_cols = schema.num_columns();
  brick.rows.assign(static_cast<std::size_t>(brick.n_rows) * brick.n_cols, 0.0);

  for (int i = 0; i < brick.n_rows; ++i) {
    for (int c = 0; c < brick.n_cols; ++c) {
      const ColumnSpec& col = schema.columns[c];
      int target = lineage_target(tree, i, col.lineage);
      if (target < 0) {
        brick.at(i, c) = kLineageSentinel;
        continue;
      }
      if (col.field) {
        brick.at(i, c) = cascade_field_value(tree.nodes[target], *col.field);
        continue;
      }
      const EventRecord* rec = lookup(tree.nodes[target].event_id);
      if (rec == nullptr) {
        throw Error(ErrorCode::SchemaMismatch,
                    "no event record for '" + tree.nodes[target].event_id + "'");
      }
      auto it = rec->attributes.find(col.attr);
      if (it == rec->attributes.end()) {
        throw Error(ErrorCode::SchemaMismatch, "event '" + rec->event_id +
                                                   "' lacks attribute '" + col.attr +
                                                   "' required by column '" + col.name + "'");
      }
      brick.at(i, c) = it->second;
    }
  }

  brick.labels_branch = derive_branch_labels(tree);
  brick.labels_speed = derive_speed_labels(tree);
  return brick;
}

std::vector<int> derive_branch_labels(const CascadeTree& tree) {
  std::vector<int> labels(tree.size());
  for (int i = 0; i < tree.size(); ++i) labels[i] = tree.nodes[i].degree > 0 ? 1 : 0;
  return labels;
}

std::vector<int> derive_speed_labels(const CascadeTree& tree) {
  std::vector<int> labels(tree.size(), kLabelAbsent);
  if (tree.size() < 2) return labels;

  std::vector<std::int64_t> delays;
  delays.reserve(tree.size() - 1);
  for (int i = 1; i < tree.size(); ++i) delays.push_back(tree.nodes[i].short_delay);
  std::sort(delays.begin(), delays.end());
  const std::size_t n = delays.size();
  const double median = (n % 2 == 1)
                            ? static_cast<double>(delays[n / 2])
                            : 0.5 * (static_cast<double>(delays[n / 2 - 1]) +
                                     static_cast<double>(delays[n / 2]));
  for (int i = 1; i < tree.size(); ++i) {
    labels[i] = static_cast<double>(tree.nodes[i].short_delay) > median ? 1 : 0;
  }
  return labels;
}

NormalizationStats fit_normalization(const Block& block) {
  if (block.bricks.empty()) throw Error(ErrorCode::EmptyCorpus, "empty block");
  const int F = block.schema.num_columns();
  NormalizationStats stats;
  stats.columns.resize(F);

  for (int c = 0; c < F; ++c) {
    const bool has_sentinel = block.schema.columns[c].lineage != Lineage::Self;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& brick : block.bricks) {
      for (int r = 0; r < brick.n_rows; ++r) {
        double x = brick.at(r, c);
        if (has_sentinel && x == kLineageSentinel) continue;
        sum += x;
        ++n;
      }
    }
    double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    double sq = 0.0;
    for (const auto& brick : block.bricks) {
      for (int r = 0; r < brick.n_rows; ++r) {
        double x = brick.at(r, c);
        if (has_sentinel && x == kLineageSentinel) continue;
        sq += (x - mean) * (x - mean);
      }
    }
    double stddev = n > 0 ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
    if (stddev == 0.0) stddev = 1.0;
    stddev = std::max(stddev, 1e-8);
    stats.columns[c] = {block.schema.columns[c].name, mean, stddev};
  }
  return stats;
}

namespace {

void check_stats(const FeatureSchema& schema, const NormalizationStats& stats) {
  if (static_cast<int>(stats.columns.size()) != schema.num_columns()) {
    throw Error(ErrorCode::StatsSchemaMismatch, "column count differs");
  }
  for (int c = 0; c < schema.num_columns(); ++c) {
    if (stats.columns[c].name != schema.columns[c].name) {
      throw Error(ErrorCode::StatsSchemaMismatch,
                  "column '" + schema.columns[c].name + "' vs stats '" +
                      stats.columns[c].name + "'");
    }
  }
}

}  // namespace

void apply_normalization(FeatureBrick& brick, const FeatureSchema& schema,
                         const NormalizationStats& stats) {
  check_stats(schema, stats);
  for (int c = 0; c < brick.n_cols; ++c) {
    const bool has_sentinel = schema.columns[c].lineage != Lineage::Self;
    const auto& cs = stats.columns[c];
    for (int r = 0; r < brick.n_rows; ++r) {
      double& x = brick.at(r, c);
      if (has_sentinel && x == kLineageSentinel) {
        x = kNormalizedSentinel;
      } else {
        x = (x - cs.mean) / cs.stddev;
      }
    }
  }
}

void apply_normalization(Block& block, const NormalizationStats& stats) {
  for (auto& brick : block.bricks) apply_normalization(brick, block.schema, stats);
  block.normalization = stats;
}

const char* task_name(Task task) { return task == Task::Branch ? "branch" : "speed"; }

Task task_from_name(const std::string& name) {
  if (name == "branch") return Task::Branch;
  if (name == "speed") return Task::Speed;
  throw Error(ErrorCode::ParseError, "unknown task '" + name + "'");
}

std::vector<std::string> label_columns(Task task) {
  if (task == Task::Branch) return {"node_degree"};
  return {"node_short_delay", "node_long_delay"};
}

void mask_label_columns(FeatureBrick& brick, const FeatureSchema& schema, Task task) {
  for (const auto& name : label_columns(task)) {
    int c = schema.column_index(name);
    if (c < 0) continue;
    for (int r = 0; r < brick.n_rows; ++r) brick.at(r, c) = 0.0;
  }
}

}  // namespace cascade
