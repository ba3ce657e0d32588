#pragma once

// The coalescent obtained by pruning a uniform random binary tree: wait
// Exp(lambda_k) with k leaves, pick a uniform internal vertex, merge the
// blocks below it into one leaf, repeat until one leaf is left.

#include "coalforge/coalescent.hpp"
#include "coalforge/rng.hpp"
#include "coalforge/treecore.hpp"

#include <functional>

namespace coalforge::prune {

struct ChainOptions {
  bool timed = false;         // Exp(lambda_k) waits; unit steps otherwise
  bool record_trees = false;  // store the tree code after every event
  /// Called with the tree after each event; used for invariant checks.
  std::function<void(const tree::LabelledBinaryTree&)> observer;
};

EventLog run_chain(int n, Rng& rng, const ChainOptions& options = {});
/// Same, drawing from a fresh generator seeded with `seed` (recorded in the log).
EventLog run_chain(int n, std::uint64_t seed, const ChainOptions& options = {});

using coalforge::collision_count;
using coalforge::last_event_stats;

struct FirstMerger {
  int merged = 0;     // blocks merged by the first event, n - k + 1
  int remaining = 0;  // k, leaves left afterwards
  tree::LabelledBinaryTree tree;  // canonically relabelled to {1}..{k}
};

/// One pruning step from a uniform n-leaf tree.
FirstMerger first_merger_snapshot(int n, Rng& rng);

}  // namespace coalforge::prune
