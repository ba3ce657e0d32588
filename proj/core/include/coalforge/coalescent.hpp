#pragma once

// State and trajectory records shared by the tree-pruning chain and the
// generic Lambda-coalescent chain. Deliberately free of any tree type.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coalforge {

using Block = std::vector<int>;

/// A partition of {1..n} into sorted, disjoint, nonempty blocks.
struct Partition {
  std::vector<Block> blocks;

  static Partition singletons(int n);
  std::size_t size() const { return blocks.size(); }
  /// Throws std::logic_error unless the blocks partition {1..n}.
  void validate(int n) const;
  /// Blocks sorted by their minimum element; a canonical form for comparison.
  Partition canonical() const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct CoalescenceEvent {
  double time = 0.0;         // absolute; step index in jump-chain mode
  int merged_blocks = 0;     // k >= 2
  int singletons = 0;        // merged blocks of size one
  std::optional<std::string> resulting_tree;  // tree code, when recorded
};

struct EventLog {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<CoalescenceEvent> events;

  /// Throws std::logic_error unless sum(k - 1) = n - 1, times strictly
  /// increase and every event merges at least two blocks.
  void validate() const;
};

struct LastEvent {
  int blocks = 0;      // B
  int singletons = 0;  // E
};

int collision_count(const EventLog& log);
LastEvent last_event_stats(const EventLog& log);

/// {"n":..,"seed":..,"events":[{"t":..,"k":..,"singletons":..}]}; a "tree"
/// member is added to events that recorded one.
nlohmann::json to_json(const EventLog& log);
EventLog event_log_from_json(const nlohmann::json& j);

}  // namespace coalforge
