#include "coalforge/coalescent.hpp"

#include <algorithm>
#include <stdexcept>

namespace coalforge {

Partition Partition::singletons(int n) {
  Partition p;
  p.blocks.reserve(n);
  for (int i = 1; i <= n; ++i) p.blocks.push_back({i});
  return p;
}

void Partition::validate(int n) const {
  std::vector<char> seen(n + 1, 0);
  int covered = 0;
  for (const auto& b : blocks) {
    if (b.empty()) throw std::logic_error("partition: empty block");
    if (!std::is_sorted(b.begin(), b.end())) throw std::logic_error("partition: unsorted block");
    for (int x : b) {
      if (x < 1 || x > n) throw std::logic_error("partition: label out of range");
      if (seen[x]) throw std::logic_error("partition: blocks overlap");
      seen[x] = 1;
      ++covered;
    }
  }
  if (covered != n) throw std::logic_error("partition: blocks do not cover {1..n}");
}

Partition Partition::canonical() const {
  Partition out = *this;
  std::sort(out.blocks.begin(), out.blocks.end());
  return out;
}

void EventLog::validate() const {
  long long reduction = 0;
  double last_time = -1.0;
  for (const auto& e : events) {
    if (e.merged_blocks < 2) throw std::logic_error("event log: merger of fewer than two blocks");
    if (e.singletons < 0 || e.singletons > e.merged_blocks) {
      throw std::logic_error("event log: singleton count out of range");
    }
    if (!(e.time > last_time)) throw std::logic_error("event log: times not strictly increasing");
    last_time = e.time;
    reduction += e.merged_blocks - 1;
  }
  if (reduction != n - 1) throw std::logic_error("event log: block counts do not telescope to n - 1");
}

int collision_count(const EventLog& log) { return static_cast<int>(log.events.size()); }

LastEvent last_event_stats(const EventLog& log) {
  if (log.events.empty()) throw std::domain_error("last_event_stats: empty log");
  const auto& last = log.events.back();
  return {last.merged_blocks, last.singletons};
}

nlohmann::json to_json(const EventLog& log) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : log.events) {
    nlohmann::json j = {{"t", e.time}, {"k", e.merged_blocks}, {"singletons", e.singletons}};
    if (e.resulting_tree) j["tree"] = *e.resulting_tree;
    events.push_back(std::move(j));
  }
  return {{"n", log.n}, {"seed", log.seed}, {"events", std::move(events)}};
}

EventLog event_log_from_json(const nlohmann::json& j) {
  EventLog log;
  log.n = j.at("n").get<int>();
  log.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("events")) {
    CoalescenceEvent ev;
    ev.time = e.at("t").get<double>();
    ev.merged_blocks = e.at("k").get<int>();
    ev.singletons = e.at("singletons").get<int>();
    if (e.contains("tree")) ev.resulting_tree = e["tree"].get<std::string>();
    log.events.push_back(std::move(ev));
  }
  return log;
}

}  // namespace coalforge
