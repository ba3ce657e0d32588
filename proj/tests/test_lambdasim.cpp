#include "coalforge/lambdasim.hpp"
#include "coalforge/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

using namespace coalforge;
using specfun::LambdaMeasure;

TEST_SUITE("lambdasim") {

TEST_CASE("rate table entries") {
  const auto beta = lambda::build_table(LambdaMeasure::pruning(), 50);
  CHECK(beta.rate(3, 2) == doctest::Approx(std::numbers::pi / 8).epsilon(1e-12));
  const auto kingman = lambda::build_table(LambdaMeasure::kingman(), 30);
  for (int b = 2; b <= 30; ++b) {
    CHECK(kingman.total(b) == specfun::binomial(b, 2));
    CHECK(kingman.merger_probability(b, 2) == 1.0);
  }
  const auto bs = lambda::build_table(LambdaMeasure::uniform(), 12);
  CHECK(bs.rate(4, 3) == doctest::Approx(1.0 / 6).epsilon(1e-10));
  for (const auto* t : {&beta, &bs}) {
    for (int b = 2; b <= t->n_max(); ++b) {
      double sum = 0.0, prob = 0.0;
      for (int k = 2; k <= b; ++k) {
        CHECK(t->rate(b, k) > 0.0);
        sum += specfun::binomial(b, k) * t->rate(b, k);
        prob += t->merger_probability(b, k);
      }
      CHECK(std::abs(sum - t->total(b)) < 1e-10 * t->total(b));
      CHECK(prob == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const auto general = lambda::build_table(LambdaMeasure::beta(1.2, 0.8), 20);
  CHECK(general.rate(7, 3) == doctest::Approx(std::exp(specfun::log_beta(1 + 1.2, 4 + 0.8))).epsilon(1e-9));
}

TEST_CASE("table limits") {
  CHECK_THROWS_AS(lambda::build_table(LambdaMeasure::uniform(), 201), std::domain_error);
  CHECK_THROWS_AS(lambda::build_table(LambdaMeasure::pruning(), 10001), std::domain_error);
  CHECK_THROWS_AS(lambda::build_table(LambdaMeasure::pruning(), 1), std::domain_error);
  const auto t = lambda::build_table(LambdaMeasure::pruning(), 5);
  Rng rng(1);
  CHECK_THROWS_AS(lambda::run_lambda_chain(6, t, rng), std::domain_error);
}

TEST_CASE("kingman n = 3 has two pairwise events") {
  const auto t = lambda::build_table(LambdaMeasure::kingman(), 3);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto log = lambda::run_lambda_chain(3, t, rng);
    REQUIRE(log.events.size() == 2);
    CHECK(log.events[0].merged_blocks == 2);
    CHECK(log.events[1].merged_blocks == 2);
  }
}

TEST_CASE("pruning measure n = 3 first merger") {
  const auto t = lambda::build_table(LambdaMeasure::pruning(), 3);
  Rng rng(3);
  int triple = 0;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) triple += lambda::run_lambda_chain(3, t, rng).events[0].merged_blocks == 3;
  CHECK(std::abs(triple / double(runs) - 0.5) < 0.01);
}

TEST_CASE("mean collision count matches the exact recursion") {
  // E[X_b] = 1 + sum_k P(k-merger) E[X_{b-k+1}], weights from lgamma directly.
  const int n = 200;
  std::vector<double> expected(n + 1, 0.0);
  for (int b = 2; b <= n; ++b) {
    std::vector<double> w;
    double top = -1e300;
    for (int k = 2; k <= b; ++k) {
      const double lw = std::lgamma(b + 1.0) - std::lgamma(k + 1.0) - std::lgamma(b - k + 1.0) +
                        std::lgamma(k - 0.5) + std::lgamma(b - k + 0.5) - std::lgamma(b + 0.0);
      w.push_back(lw);
      top = std::max(top, lw);
    }
    double norm = 0.0, acc = 0.0;
    for (int k = 2; k <= b; ++k) {
      const double x = std::exp(w[k - 2] - top);
      norm += x;
      acc += x * expected[b - k + 1];
    }
    expected[b] = 1.0 + acc / norm;
  }
  const auto t = lambda::build_table(LambdaMeasure::pruning(), n);
  Rng rng(11);
  std::vector<double> counts;
  for (int i = 0; i < 20000; ++i) counts.push_back(double(lambda::run_lambda_chain(n, t, rng).events.size()));
  const auto m = stats::mean_with_stderr(counts);
  CHECK(std::abs(m.mean - expected[n]) < 4 * m.stderr_);
}

TEST_CASE("timed mode at n = 2") {
  const auto t = lambda::build_table(LambdaMeasure::pruning(), 2);
  Rng rng(4);
  double total = 0.0;
  const int runs = 100000;
  for (int i = 0; i < runs; ++i) total += lambda::run_lambda_chain(2, t, rng, {.timed = true}).events[0].time;
  CHECK(std::abs(total / runs / (2 / std::numbers::pi) - 1) < 0.02);
}

TEST_CASE("merged subsets are exchangeable") {
  const auto t = lambda::build_table(LambdaMeasure::pruning(), 5);
  Rng rng(5);
  std::map<int, std::map<std::vector<std::size_t>, long long>> by_size;
  for (int i = 0; i < 200000; ++i) {
    auto step = lambda::sample_merge(5, t, rng);
    std::sort(step.chosen.begin(), step.chosen.end());
    ++by_size[step.k][step.chosen];
  }
  for (int k : {2, 3}) {
    const auto& cells = by_size[k];
    CHECK(cells.size() == static_cast<std::size_t>(specfun::binomial(5, k)));
    std::vector<long long> obs;
    for (const auto& [subset, c] : cells) obs.push_back(c);
    CHECK(stats::chi_square(obs, std::vector<double>(obs.size(), 1.0)).p_value > 1e-3);
  }
}

TEST_CASE("partitions stay coherent") {
  const auto t = lambda::build_table(LambdaMeasure::beta(0.5, 1.5), 60);
  Rng rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rep % 59;
    std::size_t previous = n;
    lambda::LambdaChainOptions options;
    options.timed = true;
    options.observer = [&](const Partition& p) {
      p.validate(n);
      CHECK(p.size() < previous);
      previous = p.size();
    };
    lambda::run_lambda_chain(n, t, rng, options).validate();
  }
}

}  // TEST_SUITE
