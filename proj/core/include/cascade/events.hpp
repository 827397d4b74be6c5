#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace cascade {

/// One raw platform action: a post, comment or fork. parent_id empty means
/// root event. Numeric attributes (user/content features) are carried by
/// name; their semantics depend on the platform profile.
struct EventRecord {
  std::string event_id;
  std::string parent_id;  // empty = root
  std::string author_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  std::map<std::string, double> attributes;
  std::string community;  // empty = unset

  bool is_root() const { return parent_id.empty(); }
};

}  // namespace cascade
