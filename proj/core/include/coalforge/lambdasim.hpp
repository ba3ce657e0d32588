#pragma once

// Jump-chain simulation of a Lambda-coalescent straight from its rates; it
// knows nothing about trees, which makes it an independent check on the
// tree-pruning construction.

#include "coalforge/coalescent.hpp"
#include "coalforge/rng.hpp"
#include "coalforge/specfun.hpp"

#include <functional>
#include <vector>

namespace coalforge::lambda {

class RateTable {
 public:
  /// n_max <= 10^4 for the beta(3/2,1/2) closed form and Kingman, <= 200 for
  /// quadrature-backed measures. Memory is O(n_max^2).
  static RateTable build(const specfun::LambdaMeasure& measure, int n_max);

  int n_max() const { return n_max_; }
  const specfun::LambdaMeasure& measure() const { return measure_; }
  /// lambda_{b,k}, rate of one fixed k-subset of b blocks.
  double rate(int b, int k) const { return rates_[index(b, k)]; }
  /// lambda_b, total rate of any event from b blocks.
  double total(int b) const { return totals_[b]; }
  /// P(next merger has size k | b blocks) = C(b,k) lambda_{b,k} / lambda_b.
  double merger_probability(int b, int k) const;
  int sample_merger_size(int b, Rng& rng) const;

 private:
  static std::size_t index(int b, int k) {
    return static_cast<std::size_t>(b - 2) * (b - 1) / 2 + (k - 2);
  }

  specfun::LambdaMeasure measure_;
  int n_max_ = 0;
  std::vector<double> rates_;
  std::vector<double> cumulative_;  // per row, P(size <= k)
  std::vector<double> totals_;
};

inline RateTable build_table(const specfun::LambdaMeasure& measure, int n_max) {
  return RateTable::build(measure, n_max);
}

struct MergeStep {
  int k = 0;
  std::vector<std::size_t> chosen;  // positions among the b current blocks
};

/// Merger size from the table row, then a uniform k-subset of positions
/// 0..b-1 by partial Fisher-Yates.
MergeStep sample_merge(int b, const RateTable& table, Rng& rng);

struct LambdaChainOptions {
  bool timed = false;
  std::function<void(const Partition&)> observer;
};

EventLog run_lambda_chain(int n, const RateTable& table, Rng& rng,
                          const LambdaChainOptions& options = {});

}  // namespace coalforge::lambda
