#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cascade/conditional.hpp"
#include "cascade/features.hpp"
#include "cascade/rng.hpp"
#include "cascade/tree.hpp"

namespace cascade {

struct GeneratorConfig {
  int max_depth = 160;     // deepest observed real cascade
  int max_size = 10000;
  int trials_per_seed = 1;
  std::uint64_t rng_seed = 0;
};

/// Root-event description the generator grows a cascade from.
struct SeedRoot {
  std::string seed_id;
  std::int64_t timestamp = 0;
  std::map<std::string, double> attributes;
  std::string community;
};

SeedRoot seed_from_event(const EventRecord& root_event);

/// One generated cascade: the synthesized event list plus its annotated tree
/// (rebuilt through build_cascades, so core invariants hold by construction).
struct GeneratedCascade {
  std::vector<EventRecord> events;
  CascadeTree tree;
  bool truncated = false;  // hit max_depth or max_size
};

/// Grows one cascade tree breadth-first from a seed. Each processed node
/// draws its degree from degree|level; children then draw delays from
/// delay|size_bucket (bucket tracking the growing size) and attributes from
/// attr|level. Drawn sibling delays are assigned in ascending order so birth
/// order stays consistent with time.
GeneratedCascade generate_tree(const SeedRoot& seed, const ConditionalTables& tables,
                               const GeneratorConfig& config, Rng& rng);

struct GeneratedBlock {
  Block block;
  std::vector<GeneratedCascade> cascades;
};

/// One brick per seed, stacked in seed order. The block records the rng seed
/// it was generated under.
GeneratedBlock generate_block(std::span<const SeedRoot> seeds, const ConditionalTables& tables,
                              const FeatureSchema& schema, const GeneratorConfig& config,
                              std::uint64_t rng_seed);

}  // namespace cascade
