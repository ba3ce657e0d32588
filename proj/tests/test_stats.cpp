#include "coalforge/rng.hpp"
#include "coalforge/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace coalforge;
using namespace coalforge::stats;

TEST_SUITE("stats") {

TEST_CASE("ks_statistic") {
  Rng rng(1);
  std::vector<double> u(10000);
  for (auto& x : u) x = uniform_open(rng);
  CHECK(ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) < 0.02);
  const std::vector<double> constant(200, 0.5);
  CHECK(ks_statistic(constant, [](double x) { return std::clamp(x, 0.0, 1.0); }) >= 0.5);
  std::vector<double> ray(10000);
  for (auto& x : ray) x = std::sqrt(-2 * std::log(uniform_open(rng)));
  CHECK(ks_statistic(ray, [](double x) { return x <= 0 ? 0.0 : 1 - std::exp(-x); }) > 0.1);
  CHECK(ks_statistic(ray, rayleigh_cdf) < 0.02);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, rayleigh_cdf), std::domain_error);
  // exact small case: one point at the median
  CHECK(ks_statistic(std::vector<double>{0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
}

TEST_CASE("chi_square") {
  const std::vector<long long> obs{10, 20, 30, 40};
  const auto exact = chi_square(obs, std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(exact.statistic == doctest::Approx(0.0));
  CHECK(exact.p_value == 1.0);
  CHECK(exact.dof == 3);

  Rng rng(2);
  std::uniform_int_distribution<int> cell(0, 11);
  std::vector<long long> uni(12, 0);
  for (int i = 0; i < 120000; ++i) ++uni[cell(rng)];
  CHECK(chi_square(uni, std::vector<double>(12, 1.0)).p_value > 1e-3);

  CHECK_THROWS_AS(chi_square(std::vector<long long>{1, 2}, std::vector<double>{1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(chi_square(std::vector<long long>{1, 2}, std::vector<double>{1.0}), std::domain_error);

  // sparse tail cells get merged
  const auto merged = chi_square(std::vector<long long>{500, 480, 3, 1, 0, 1},
                                 std::vector<double>{0.5, 0.49, 0.004, 0.003, 0.002, 0.001});
  CHECK(merged.cells == 3);

  // Pearson statistic by hand: (60-50)^2/50 + (40-50)^2/50 = 4, dof 1
  const auto hand = chi_square(std::vector<long long>{60, 40}, std::vector<double>{0.5, 0.5});
  CHECK(hand.statistic == doctest::Approx(4.0));
  CHECK(hand.p_value == doctest::Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("survival function") {
  CHECK(chi_square_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  for (double x : {0.5, 2.0, 9.0}) CHECK(chi_square_survival(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-12));
  CHECK(chi_square_survival(0.0, 4) == 1.0);
}

TEST_CASE("two-sample chi-square") {
  const std::vector<long long> a{100, 200, 300};
  const auto same = chi_square_two_sample(a, a);
  CHECK(same.statistic == doctest::Approx(0.0));
  CHECK(same.p_value == 1.0);
  const auto diff = chi_square_two_sample(a, std::vector<long long>{300, 200, 100});
  CHECK(diff.p_value < 1e-10);
  CHECK_THROWS_AS(chi_square_two_sample(a, std::vector<long long>{0, 0, 0}), std::domain_error);
}

TEST_CASE("distribution helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(rayleigh_cdf(-1.0) == 0.0);
  CHECK(rayleigh_cdf(1.0) == doctest::Approx(1 - std::exp(-0.5)));
  const auto m = mean_with_stderr(std::vector<double>{1, 2, 3, 4});
  CHECK(m.mean == 2.5);
  CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK_THROWS(mean_with_stderr(std::vector<double>{}));
}

TEST_CASE("retry rule") {
  auto run = [](std::vector<double> ps) {
    return with_retries([ps](int a) { return ps.at(a); });
  };
  CHECK(run({0.5, 0.5, 0.5}).attempts == 2);
  CHECK(run({0.5, 0.5, 0.5}).pass);
  CHECK(run({1e-4, 0.5, 0.5}).pass);
  CHECK(run({1e-4, 0.5, 0.5}).attempts == 3);
  CHECK_FALSE(run({1e-4, 1e-4, 0.5}).pass);
  CHECK(run({1e-4, 1e-4, 0.5}).attempts == 2);
  CHECK_FALSE(run({0.5, 1e-4, 1e-5}).pass);
}

TEST_CASE("histograms") {
  const std::vector<double> xs{1, 2, 2, 3, 5};
  const auto h = integer_histogram(xs);
  CHECK(h.count == std::vector<long long>{1, 2, 1, 0, 1});
  std::ostringstream os;
  write_csv(os, h);
  CHECK(os.str().rfind("bin_low,bin_high,count\n1,2,1\n", 0) == 0);
  const auto r = histogram(std::vector<double>{0.0, 0.1, 0.9, 1.0}, 2);
  CHECK(r.count == std::vector<long long>{2, 2});
  CHECK(r.high.back() == 1.0);
}

TEST_CASE("stream derivation") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(derive_stream_seed(1, 2) == derive_stream_seed(1, 2));
  CHECK(derive_stream_seed(1, 2) != derive_stream_seed(2, 1));
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(derive_stream_seed(42, i));
  CHECK(seeds.size() == 10000);
  Rng rng(0);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_open(rng);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

}  // TEST_SUITE
