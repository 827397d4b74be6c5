#include "cascade/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <unordered_map>

#include "cascade/errors.hpp"

namespace cascade {

SeedRoot seed_from_event(const EventRecord& root_event) {
  SeedRoot seed;
  seed.seed_id = root_event.event_id;
  seed.timestamp = root_event.timestamp;
  seed.attributes = root_event.attributes;
  seed.community = root_event.community;
  return seed;
}

namespace {

struct Pending {
  int event_index;
  int level;
};

std::string generated_id(const std::string& seed_id, int counter) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08d", counter);
  return seed_id + "/" + buf;
}

}  // namespace

GeneratedCascade generate_tree(const SeedRoot& seed, const ConditionalTables& tables,
                               const GeneratorConfig& config, Rng& rng) {
  const ConditionalTable& degree_level = tables.require("degree", "level");
  const ConditionalTable& delay_bucket = tables.require("delay", "size_bucket");

  // Attribute tables in deterministic (fitted) order.
  std::vector<const ConditionalTable*> attr_tables;
  for (const auto& t : tables.tables) {
    if (t.condition == "level" && t.target != "degree" && t.target != "speed_class") {
      attr_tables.push_back(&t);
    }
  }

  GeneratedCascade out;
  EventRecord root;
  root.event_id = seed.seed_id;
  root.author_id = "gen";
  root.timestamp = seed.timestamp;
  root.attributes = seed.attributes;
  root.community = seed.community;
  out.events.push_back(std::move(root));

  std::deque<Pending> queue;
  queue.push_back({0, 0});
  int counter = 0;
  std::int64_t current_size = 1;

  while (!queue.empty()) {
    const Pending cur = queue.front();
    queue.pop_front();

    if (cur.level >= config.max_depth) {
      out.truncated = true;
      continue;
    }
    int degree = static_cast<int>(degree_level.sample(cur.level, rng));
    if (degree <= 0) continue;
    if (current_size + degree > config.max_size) {
      degree = static_cast<int>(config.max_size - current_size);
      out.truncated = true;
      if (degree <= 0) continue;
    }

    // Delays first (each draw sees the size including previously added
    // siblings), sorted ascending so birth order follows time.
    std::vector<std::int64_t> delays(degree);
    for (int k = 0; k < degree; ++k) {
      delays[k] = static_cast<std::int64_t>(delay_bucket.sample(size_bucket(current_size), rng));
      ++current_size;
    }
    std::sort(delays.begin(), delays.end());

    const std::int64_t parent_time = out.events[cur.event_index].timestamp;
    const std::string parent_id = out.events[cur.event_index].event_id;
    const int child_level = cur.level + 1;
    for (int k = 0; k < degree; ++k) {
      EventRecord child;
      child.event_id = generated_id(seed.seed_id, ++counter);
      child.parent_id = parent_id;
      child.author_id = "gen";
      child.timestamp = parent_time + delays[k];
      child.community = seed.community;
      for (const ConditionalTable* t : attr_tables) {
        child.attributes[t->target] = t->sample(child_level, rng);
      }
      out.events.push_back(std::move(child));
      queue.push_back({static_cast<int>(out.events.size()) - 1, child_level});
    }
  }

  BuildResult built = build_cascades(out.events);
  if (built.trees.size() != 1 || !built.issues.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "generated events did not form one clean tree");
  }
  out.tree = std::move(built.trees.front());
  return out;
}

GeneratedBlock generate_block(std::span<const SeedRoot> seeds, const ConditionalTables& tables,
                              const FeatureSchema& schema, const GeneratorConfig& config,
                              std::uint64_t rng_seed) {
  if (seeds.empty()) throw Error(ErrorCode::EmptyCorpus, "no seeds");

  GeneratedBlock out;
  out.block.schema = schema;
  out.block.rng_seed = rng_seed;
  Rng rng(rng_seed);

  for (const SeedRoot& seed : seeds) {
    GeneratedCascade cascade = generate_tree(seed, tables, config, rng);
    std::unordered_map<std::string, const EventRecord*> by_id;
    by_id.reserve(cascade.events.size());
    for (const auto& e : cascade.events) by_id.emplace(e.event_id, &e);
    auto lookup = [&by_id](const std::string& id) -> const EventRecord* {
      auto it = by_id.find(id);
      return it != by_id.end() ? it->second : nullptr;
    };
    out.block.bricks.push_back(brick_from_tree(cascade.tree, schema, lookup));
    out.cascades.push_back(std::move(cascade));
  }
  return out;
}

}  // namespace cascade
