#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cascade/events.hpp"

namespace cascade {

/// A node of an annotated cascade tree. Nodes live in the tree's arena in
/// chronological order; parent/children are arena indices.
struct CascadeNode {
  std::string event_id;
  std::int64_t time = 0;
  int parent = -1;  // arena index, -1 for root
  int level = 0;
  int birth_order = 1;  // rank among siblings by time, 1 = earliest; root = 1
  int degree = 0;
  std::int64_t short_delay = 0;  // time - parent time, 0 for root
  std::int64_t long_delay = 0;   // time - root time, 0 for root
  std::vector<int> children;     // chronological
};

/// Rooted cascade tree. nodes[0] is the root; the arena is sorted by
/// (time, level, event_id), so every ancestor precedes its descendants.
struct CascadeTree {
  std::vector<CascadeNode> nodes;
  int max_depth = 0;
  std::string community;

  int size() const { return static_cast<int>(nodes.size()); }
  const CascadeNode& root() const { return nodes.front(); }
  const std::string& cascade_id() const { return nodes.front().event_id; }
};

enum class BuildIssueKind { DanglingParent, CycleDetected, TimeInversion, DuplicateId };

struct BuildIssue {
  BuildIssueKind kind;
  std::string event_id;
};

struct BuildResult {
  std::vector<CascadeTree> trees;
  std::vector<BuildIssue> issues;
  int dropped_events = 0;  // events excluded from any returned tree
};

/// Builds annotated cascade trees from a flat event list. Deterministic for
/// any input order. Orphan subtrees (dangling parent) and cycles are dropped
/// and reported; a tree containing a child strictly earlier than its parent
/// is rejected whole with a TimeInversion issue.
BuildResult build_cascades(std::span<const EventRecord> events);

/// Node count per level; keys are exactly 0..max_depth.
std::map<int, int> breadth_profile(const CascadeTree& tree);

int max_breadth(const CascadeTree& tree);

/// Mean shortest-path distance over all unordered node pairs (Wiener index
/// over pair count). 0 for a singleton by convention.
double structural_virality(const CascadeTree& tree);

/// Max node time minus root time.
std::int64_t lifetime(const CascadeTree& tree);

}  // namespace cascade
