#include "coalforge/prunesim.hpp"

#include "coalforge/specfun.hpp"

#include <stdexcept>

namespace coalforge::prune {

EventLog run_chain(int n, Rng& rng, const ChainOptions& options) {
  if (n < 2) throw std::domain_error("run_chain: need n >= 2");
  tree::LabelledBinaryTree t = tree::sample_uniform(n, rng);
  EventLog log;
  log.n = n;
  double time = 0.0;
  while (t.leaf_count() > 1) {
    const int k = static_cast<int>(t.leaf_count());
    if (options.timed) {
      std::exponential_distribution<double> wait(specfun::rate_total(k));
      time += wait(rng);
    } else {
      time += 1.0;
    }
    const auto internals = t.internal_nodes();
    std::uniform_int_distribution<std::size_t> pick(0, internals.size() - 1);
    const tree::PruneSummary summary = t.prune(internals[pick(rng)]);

    CoalescenceEvent event;
    event.time = time;
    event.merged_blocks = static_cast<int>(summary.merged_blocks);
    event.singletons = static_cast<int>(summary.singletons);
    if (options.record_trees) event.resulting_tree = tree::encode(t).code;
    log.events.push_back(std::move(event));
    if (options.observer) options.observer(t);
  }
  return log;
}

EventLog run_chain(int n, std::uint64_t seed, const ChainOptions& options) {
  Rng rng(seed);
  EventLog log = run_chain(n, rng, options);
  log.seed = seed;
  return log;
}

FirstMerger first_merger_snapshot(int n, Rng& rng) {
  if (n < 3) throw std::domain_error("first_merger_snapshot: need n >= 3");
  tree::LabelledBinaryTree t = tree::sample_uniform(n, rng);
  const auto internals = t.internal_nodes();
  std::uniform_int_distribution<std::size_t> pick(0, internals.size() - 1);
  const auto summary = t.prune(internals[pick(rng)]);
  return {static_cast<int>(summary.merged_blocks), static_cast<int>(t.leaf_count()),
          tree::canonical_relabel(t)};
}

}  // namespace coalforge::prune
