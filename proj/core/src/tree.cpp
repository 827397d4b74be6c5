#include "cascade/tree.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cascade/errors.hpp"

namespace cascade {

namespace {

struct Ev {
  const EventRecord* rec;
  int root = -1;       // index into roots, -1 = unresolved
  bool dropped = false;
};

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::StatsSchemaMismatch: return "StatsSchemaMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AllLabelsAbsent: return "AllLabelsAbsent";
    case ErrorCode::AllScoresAbsent: return "AllScoresAbsent";
    case ErrorCode::BinningMismatch: return "BinningMismatch";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

BuildResult build_cascades(std::span<const EventRecord> events) {
  if (events.empty()) throw Error(ErrorCode::EmptyCorpus, "no events");

  BuildResult result;

  // Deterministic working order, independent of input order.
  std::vector<const EventRecord*> sorted;
  sorted.reserve(events.size());
  for (const auto& e : events) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const EventRecord* a, const EventRecord* b) {
    if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
    return a->event_id < b->event_id;
  });

  std::unordered_map<std::string, int> by_id;
  std::vector<Ev> evs;
  evs.reserve(sorted.size());
  for (const EventRecord* rec : sorted) {
    auto [it, inserted] = by_id.emplace(rec->event_id, static_cast<int>(evs.size()));
    if (!inserted) {
      result.issues.push_back({BuildIssueKind::DuplicateId, rec->event_id});
      result.dropped_events++;
      continue;
    }
    evs.push_back({rec});
  }

  // Resolve each event to its root by walking parent chains. Colors:
  // 0 unvisited, 1 on current path (cycle detector), 2 resolved.
  std::vector<int> color(evs.size(), 0);
  std::vector<int> root_of(evs.size(), -1);  // evs index of the root, -2 = dropped
  std::vector<int> path;
  for (int i = 0; i < static_cast<int>(evs.size()); ++i) {
    if (color[i] == 2) continue;
    path.clear();
    int cur = i;
    int terminal_root = -1;
    bool dangling = false;
    bool cycle = false;
    while (true) {
      if (color[cur] == 2) {
        terminal_root = root_of[cur];
        break;
      }
      if (color[cur] == 1) {
        cycle = true;
        break;
      }
      color[cur] = 1;
      path.push_back(cur);
      const EventRecord* rec = evs[cur].rec;
      if (rec->is_root()) {
        terminal_root = cur;
        break;
      }
      auto it = by_id.find(rec->parent_id);
      if (it == by_id.end() || rec->parent_id == rec->event_id) {
        dangling = true;
        break;
      }
      cur = it->second;
    }
    if (cycle) {
      // Every event on the cycle itself gets reported; hangers-on are just
      // dropped as part of the unresolved subtree.
      result.issues.push_back({BuildIssueKind::CycleDetected, evs[cur].rec->event_id});
      terminal_root = -2;
    } else if (dangling) {
      result.issues.push_back({BuildIssueKind::DanglingParent, evs[cur].rec->event_id});
      terminal_root = -2;
    }
    for (int idx : path) {
      color[idx] = 2;
      root_of[idx] = terminal_root;
    }
  }

  // Group events by root, in arena (chronological) order.
  std::unordered_map<int, std::vector<int>> groups;
  std::vector<int> root_order;
  for (int i = 0; i < static_cast<int>(evs.size()); ++i) {
    if (root_of[i] < 0) {
      result.dropped_events++;
      continue;
    }
    auto [it, inserted] = groups.emplace(root_of[i], std::vector<int>{});
    if (inserted) root_order.push_back(root_of[i]);
    it->second.push_back(i);
  }

  for (int root_idx : root_order) {
    auto& members = groups[root_idx];

    // Reject trees with a time inversion along any parent edge.
    bool inverted = false;
    for (int idx : members) {
      const EventRecord* rec = evs[idx].rec;
      if (rec->is_root()) continue;
      const EventRecord* parent = evs[by_id[rec->parent_id]].rec;
      if (rec->timestamp < parent->timestamp) {
        result.issues.push_back({BuildIssueKind::TimeInversion, rec->event_id});
        inverted = true;
        break;
      }
    }
    if (inverted) {
      result.dropped_events += static_cast<int>(members.size());
      continue;
    }

    // Chronological arena order: (time, level, id). The level key keeps
    // parents ahead of children that share their timestamp.
    std::unordered_map<std::string, int> level_of;
    level_of.reserve(members.size());
    // members are already time-ordered; parents precede children in time, so
    // one forward pass assigns levels (equal-time parents need a fix-up pass).
    bool progressed = true;
    std::unordered_map<std::string, const EventRecord*> in_tree;
    for (int idx : members) in_tree.emplace(evs[idx].rec->event_id, evs[idx].rec);
    level_of[evs[root_idx].rec->event_id] = 0;
    while (progressed) {
      progressed = false;
      for (int idx : members) {
        const EventRecord* rec = evs[idx].rec;
        if (level_of.count(rec->event_id)) continue;
        auto pit = level_of.find(rec->parent_id);
        if (pit != level_of.end()) {
          level_of[rec->event_id] = pit->second + 1;
          progressed = true;
        }
      }
    }

    std::vector<const EventRecord*> arena;
    arena.reserve(members.size());
    for (int idx : members) arena.push_back(evs[idx].rec);
    std::sort(arena.begin(), arena.end(),
              [&](const EventRecord* a, const EventRecord* b) {
                if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
                int la = level_of[a->event_id], lb = level_of[b->event_id];
                if (la != lb) return la < lb;
                return a->event_id < b->event_id;
              });

    CascadeTree tree;
    tree.community = evs[root_idx].rec->community;
    tree.nodes.resize(arena.size());
    std::unordered_map<std::string, int> pos;
    pos.reserve(arena.size());
    for (int i = 0; i < static_cast<int>(arena.size()); ++i) pos[arena[i]->event_id] = i;

    for (int i = 0; i < static_cast<int>(arena.size()); ++i) {
      const EventRecord* rec = arena[i];
      CascadeNode& node = tree.nodes[i];
      node.event_id = rec->event_id;
      node.time = rec->timestamp;
      node.level = level_of[rec->event_id];
      if (!rec->is_root()) {
        node.parent = pos[rec->parent_id];
        CascadeNode& par = tree.nodes[node.parent];
        par.children.push_back(i);  // arena order == chronological
        node.birth_order = static_cast<int>(par.children.size());
        node.short_delay = rec->timestamp - arena[node.parent]->timestamp;
      }
      node.long_delay = rec->timestamp - arena[0]->timestamp;
      tree.max_depth = std::max(tree.max_depth, node.level);
    }
    for (auto& node : tree.nodes) node.degree = static_cast<int>(node.children.size());

    result.trees.push_back(std::move(tree));
  }

  // Output tree order: by (root time, root id), which the arena sort already
  // gives within groups; root_order follows evs order = (time, id).
  std::sort(result.trees.begin(), result.trees.end(),
            [](const CascadeTree& a, const CascadeTree& b) {
              if (a.root().time != b.root().time) return a.root().time < b.root().time;
              return a.root().event_id < b.root().event_id;
            });
  return result;
}

std::map<int, int> breadth_profile(const CascadeTree& tree) {
  std::map<int, int> counts;
  for (const auto& node : tree.nodes) counts[node.level]++;
  return counts;
}

int max_breadth(const CascadeTree& tree) {
  int best = 0;
  for (const auto& [level, count] : breadth_profile(tree)) best = std::max(best, count);
  return best;
}

double structural_virality(const CascadeTree& tree) {
  const int n = tree.size();
  if (n < 2) return 0.0;
  // Sum of pairwise distances decomposes over edges: an edge splitting off a
  // subtree of s nodes lies on s*(n-s) shortest paths.
  std::vector<std::int64_t> subtree(n, 1);
  for (int i = n - 1; i >= 1; --i) subtree[tree.nodes[i].parent] += subtree[i];
  double wiener = 0.0;
  for (int i = 1; i < n; ++i) {
    wiener += static_cast<double>(subtree[i]) * static_cast<double>(n - subtree[i]);
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return wiener / pairs;
}

std::int64_t lifetime(const CascadeTree& tree) {
  std::int64_t last = tree.nodes.front().time;
  for (const auto& node : tree.nodes) last = std::max(last, node.time);
  return last - tree.nodes.front().time;
}

}  // namespace cascade
