#include "cascade/conditional.hpp"

#include <cmath>

#include "cascade/errors.hpp"

namespace cascade {

std::uint64_t hist_total(const ValueHist& hist) {
  std::uint64_t total = 0;
  for (const auto& [value, count] : hist) total += count;
  return total;
}

const ValueHist& ConditionalTable::hist_for(std::int64_t key) const {
  auto it = by_key.find(key);
  return it != by_key.end() ? it->second : fallback;
}

double sample_hist(const ValueHist& hist, Rng& rng) {
  const std::uint64_t total = hist_total(hist);
  std::uint64_t pick = rng.bounded(total);
  for (const auto& [value, count] : hist) {
    if (pick < count) return value;
    pick -= count;
  }
  return hist.rbegin()->first;  // unreachable for a consistent total
}

double ConditionalTable::sample(std::int64_t key, Rng& rng) const {
  return sample_hist(hist_for(key), rng);
}

double ConditionalTable::prob_positive(std::int64_t key) const {
  const ValueHist& hist = hist_for(key);
  std::uint64_t total = 0, positive = 0;
  for (const auto& [value, count] : hist) {
    total += count;
    if (value > 0.0) positive += count;
  }
  return total == 0 ? 0.0 : static_cast<double>(positive) / static_cast<double>(total);
}

const ConditionalTable* ConditionalTables::find(const std::string& target,
                                                const std::string& condition) const {
  for (const auto& t : tables) {
    if (t.target == target && t.condition == condition) return &t;
  }
  return nullptr;
}

const ConditionalTable& ConditionalTables::require(const std::string& target,
                                                   const std::string& condition) const {
  const ConditionalTable* t = find(target, condition);
  if (t == nullptr) {
    throw Error(ErrorCode::MissingArtifact, "conditional table " + target + "|" + condition);
  }
  return *t;
}

std::int64_t size_bucket(std::int64_t size) {
  std::int64_t bucket = 0;
  while (size > 1) {
    size >>= 1;
    ++bucket;
  }
  return bucket;
}

namespace {

void add_observation(ConditionalTable& table, std::int64_t key, double value) {
  table.by_key[key][value]++;
  table.fallback[value]++;
}

}  // namespace

ConditionalTables fit_conditionals(std::span<const CascadeTree> trees,
                                   const FeatureSchema& schema,
                                   const AttributeLookup& lookup) {
  if (trees.empty()) throw Error(ErrorCode::EmptyCorpus, "no training trees");

  ConditionalTables out;
  auto add_table = [&out](const std::string& target, const std::string& condition) {
    ConditionalTable t;
    t.target = target;
    t.condition = condition;
    out.tables.push_back(std::move(t));
  };
  add_table("degree", "level");
  add_table("degree", "birth_order");
  add_table("speed_class", "level");
  add_table("speed_class", "birth_order");
  add_table("delay", "size_bucket");
  // One attr|level table per attribute-backed self column. User columns get
  // one too; generated nodes need every schema attribute populated.
  std::vector<std::string> attr_names;
  for (const auto& col : schema.columns) {
    if (col.field || col.lineage != Lineage::Self) continue;
    add_table(col.attr, "level");
    attr_names.push_back(col.attr);
  }

  ConditionalTable& degree_level = out.tables[0];
  ConditionalTable& degree_birth = out.tables[1];
  ConditionalTable& speed_level = out.tables[2];
  ConditionalTable& speed_birth = out.tables[3];
  ConditionalTable& delay_bucket = out.tables[4];
  std::vector<std::pair<std::string, ConditionalTable*>> attr_tables;
  for (std::size_t i = 0; i < attr_names.size(); ++i) {
    attr_tables.emplace_back(attr_names[i], &out.tables[5 + i]);
  }

  for (const auto& tree : trees) {
    const std::int64_t bucket = size_bucket(tree.size());
    const auto speed = derive_speed_labels(tree);
    for (int i = 0; i < tree.size(); ++i) {
      const CascadeNode& node = tree.nodes[i];
      add_observation(degree_level, node.level, static_cast<double>(node.degree));
      add_observation(degree_birth, node.birth_order, static_cast<double>(node.degree));
      if (speed[i] != kLabelAbsent) {
        add_observation(speed_level, node.level, static_cast<double>(speed[i]));
        add_observation(speed_birth, node.birth_order, static_cast<double>(speed[i]));
        add_observation(delay_bucket, bucket, static_cast<double>(node.short_delay));
      }
      if (!attr_tables.empty()) {
        const EventRecord* rec = lookup(node.event_id);
        for (auto& [attr, table] : attr_tables) {
          if (rec == nullptr) continue;
          auto it = rec->attributes.find(attr);
          if (it != rec->attributes.end()) add_observation(*table, node.level, it->second);
        }
      }
    }
  }
  return out;
}

const char* baseline_scenario_name(BaselineScenario s) {
  switch (s) {
    case BaselineScenario::DegreeLevel: return "degree_level";
    case BaselineScenario::DegreeBirthOrder: return "degree_birth_order";
    case BaselineScenario::SpeedLevel: return "speed_level";
    case BaselineScenario::SpeedBirthOrder: return "speed_birth_order";
  }
  return "?";
}

BaselinePrediction baseline_predict(int level, int birth_order, BaselineScenario scenario,
                                    const ConditionalTables& tables, Rng& rng) {
  const bool degree = scenario == BaselineScenario::DegreeLevel ||
                      scenario == BaselineScenario::DegreeBirthOrder;
  const bool by_level = scenario == BaselineScenario::DegreeLevel ||
                        scenario == BaselineScenario::SpeedLevel;
  const ConditionalTable& table =
      tables.require(degree ? "degree" : "speed_class", by_level ? "level" : "birth_order");
  const std::int64_t key = by_level ? level : birth_order;

  BaselinePrediction pred;
  pred.score = table.prob_positive(key);
  const double draw = table.sample(key, rng);
  pred.label = degree ? (draw > 0.0 ? 1 : 0) : static_cast<int>(draw);
  return pred;
}

}  // namespace cascade
