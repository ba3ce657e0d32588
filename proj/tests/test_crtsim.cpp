#include "coalforge/crtsim.hpp"
#include "coalforge/specfun.hpp"
#include "coalforge/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace coalforge;
using std::numbers::pi;

namespace {

bool refines(const Partition& fine, const Partition& coarse) {
  for (const auto& block : fine.blocks) {
    bool inside = false;
    for (const auto& big : coarse.blocks) {
      if (std::includes(big.begin(), big.end(), block.begin(), block.end())) inside = true;
    }
    if (!inside) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("crtsim") {

TEST_CASE("reduced tree structure") {
  Rng rng(1);
  const auto one = crt::sample_reduced_tree(1, rng);
  one.validate();
  CHECK(one.edge_count() == 1);
  CHECK(one.internal_length == 0.0);
  CHECK(one.lengths[0] == one.total_length);
  for (int n : {2, 5, 40}) {
    const auto t = crt::sample_reduced_tree(n, rng);
    t.validate();
    CHECK(t.edge_count() == static_cast<std::size_t>(2 * n - 1));
    int internal_edges = 0;
    for (std::size_t e = 0; e < t.edge_count(); ++e) internal_edges += !t.shape.is_leaf(tree::NodeId{static_cast<std::uint32_t>(e)});
    CHECK(internal_edges == n - 1);
  }
  CHECK_THROWS_AS(crt::sample_reduced_tree(0, rng), std::domain_error);
}

TEST_CASE("first edge length and s_n^2") {
  CHECK(crt::expected_first_length(1) == doctest::Approx(std::sqrt(pi) / std::pow(2.0, 1.5)).epsilon(1e-12));
  // Gamma(n - 1/2)/Gamma(n) from the standard library
  CHECK(crt::expected_first_length(5) == doctest::Approx(std::pow(2.0, -1.5) * std::tgamma(4.5) / std::tgamma(5.0)));
  Rng rng(2);
  for (int n : {1, 5}) {
    double h = 0.0, s2 = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      const auto t = crt::sample_reduced_tree(n, rng);
      h += t.lengths[0];
      s2 += t.total_length * t.total_length;
    }
    CHECK(std::abs(h / draws / crt::expected_first_length(n) - 1) < 0.01);
    CHECK(std::abs(s2 / draws / (0.5 * n) - 1) < 0.01);
  }
}

TEST_CASE("E[H_3] and length exchangeability") {
  Rng rng(3);
  const int draws = 100000;
  double h = 0.0;
  for (int i = 0; i < draws; ++i) h += crt::h_statistic(crt::sample_reduced_tree(3, rng));
  CHECK(std::abs(h / draws / (std::sqrt(2 / pi) * 3 * pi / 4) - 1) < 0.02);
  CHECK(std::sqrt(2 / pi) * specfun::rate_total(3) == doctest::Approx(1.88).epsilon(1e-3));

  std::vector<double> first(draws), last(draws);
  for (int i = 0; i < draws; ++i) {
    const auto t = crt::sample_reduced_tree(5, rng);
    first[i] = t.lengths.front();
    last[i] = t.lengths.back();
  }
  const auto a = stats::mean_with_stderr(first);
  const auto b = stats::mean_with_stderr(last);
  CHECK(std::abs(a.mean - b.mean) < 3 * std::hypot(a.stderr_, b.stderr_));
}

TEST_CASE("length density total mass is 2n - 1") {
  for (int n : {1, 2, 3, 7, 20}) CHECK(crt::length_density_mass(n) == doctest::Approx(2.0 * n - 1).epsilon(1e-9));
}

TEST_CASE("n = 2 pruning") {
  Rng rng(4);
  std::array<int, 3> w{};
  for (int i = 0; i < 20000; ++i) {
    const auto t = crt::sample_reduced_tree(2, rng);
    const auto run = crt::run_crt_pruning(t, {}, rng);
    CHECK(run.U == 2);
    CHECK(run.V == 2);
    REQUIRE(run.W >= 0);
    REQUIRE(run.W <= 2);
    ++w[run.W];
  }
  CHECK(w[0] > 0);
  CHECK(w[1] > 0);
  CHECK(w[2] > 0);
  auto t = crt::sample_reduced_tree(1, rng);
  CHECK_THROWS_AS(crt::run_crt_pruning(t, {}, rng), std::domain_error);
}

TEST_CASE("mark process invariants") {
  Rng rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + rep % 60;
    const auto t = crt::sample_reduced_tree(n, rng);
    const auto run = crt::run_crt_pruning(t, {.alpha = 0.5 + rep % 3}, rng);
    REQUIRE(!run.marks.empty());
    CHECK(run.marks.back().edge == t.root_edge());
    CHECK(run.marks.back().theta == run.L);
    for (std::size_t i = 0; i + 1 < run.marks.size(); ++i) {
      CHECK(run.marks[i].theta < run.marks[i + 1].theta);
      CHECK(run.marks[i].position > 0.0);
      CHECK(run.marks[i].position < t.lengths[run.marks[i].edge.value]);
    }
    CHECK(run.U >= 2);
    CHECK(run.U >= run.V);
    CHECK(run.V >= run.W);
    CHECK(run.x_coalescent <= run.x_prune);
    CHECK(run.x_coalescent >= 1);

    // classes only grow, up to the state just before L
    Partition previous = Partition::singletons(n);
    for (const auto& m : run.marks) {
      const auto p = crt::partition_at(t, run, m.theta);
      p.validate(n);
      CHECK(refines(previous, p));
      previous = p;
    }
    const auto before_l = crt::partition_at(t, run, run.L);
    CHECK(static_cast<int>(before_l.size()) == run.U);
    int singles = 0;
    for (const auto& b : before_l.blocks) singles += b.size() == 1;
    CHECK(singles >= run.W);
    CHECK(singles == run.V);
  }
}

TEST_CASE("reruns reproduce") {
  auto once = [](std::uint64_t seed) {
    Rng rng(seed);
    const auto t = crt::sample_reduced_tree(200, rng);
    const auto run = crt::run_crt_pruning(t, {}, rng);
    return crt::summary_json(t, run, seed).dump();
  };
  CHECK(once(11) == once(11));
  CHECK(once(11) != once(12));
  const auto j = nlohmann::json::parse(once(11));
  for (const char* key : {"n", "seed", "U", "V", "W", "L", "H"}) CHECK(j.contains(key));
}

TEST_CASE("first marked edge is uniform at n = 5") {
  Rng rng(6);
  std::vector<long long> counts(9, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto t = crt::sample_reduced_tree(5, rng);
    ++counts[crt::run_crt_pruning(t, {}, rng).first_marked_edge.value];
  }
  CHECK(stats::chi_square(counts, std::vector<double>(9, 1.0)).p_value > 1e-3);
}

TEST_CASE("dust") {
  Rng rng(7);
  CHECK_THROWS_AS(crt::sample_dust(0.0, rng), std::domain_error);
  for (int i = 0; i < 100; ++i) CHECK(crt::sample_dust(1e-9, rng) > 0.999);
  // same normal draw, increasing theta
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t s = rng();
    Rng a(s), b(s);
    CHECK(crt::sample_dust(0.3, a) >= crt::sample_dust(0.9, b));
  }
  int below = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) below += crt::sample_dust(0.5, rng) <= 0.5;
  CHECK(std::abs(below / double(draws) - crt::dust_cdf(0.5, 0.5)) < 0.01);
  // 2 Phi(2 theta sqrt(x/(1-x))) - 1 via the normal CDF
  CHECK(crt::dust_cdf(0.5, 0.5) == doctest::Approx(2 * stats::normal_cdf(1.0) - 1).epsilon(1e-14));
  CHECK(crt::dust_cdf(0.5, 0.0) == 0.0);
  CHECK(crt::dust_cdf(0.5, 1.0) == 1.0);
}

TEST_CASE("dust paths") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto path = crt::sample_dust_path(rng, 0.01, 20.0);
    CHECK(path.size() == 2001);
    CHECK(path.front() == 1.0);
    for (std::size_t j = 1; j < path.size(); ++j) {
      CHECK(path[j] > 0.0);
      CHECK(path[j] <= path[j - 1]);
    }
  }
  const auto s = crt::estimate_theta_integral(rng, 0.01, 20.0);
  CHECK(s.riemann_sum > 0.0);
  CHECK(s.tail_estimate > 0.0);
  CHECK(s.value() == s.riemann_sum + s.tail_estimate);
  CHECK_THROWS_AS(crt::estimate_theta_integral(rng, 0.02, 20.0), std::domain_error);
  CHECK_THROWS_AS(crt::estimate_theta_integral(rng, 0.01, 10.0), std::domain_error);
}

TEST_CASE("Theta mean matches the dust law it is built from") {
  // E[sigma_theta] = E[N^2 / (N^2 + 4 theta^2)]; integrating over theta gives
  // E|N| pi / 4 = sqrt(pi / 8).
  Rng rng(9);
  std::vector<double> values(20000);
  for (auto& v : values) v = crt::estimate_theta_integral(rng).value();
  const auto m = stats::mean_with_stderr(values);
  CHECK(std::abs(m.mean - std::sqrt(pi / 8)) < 4 * m.stderr_ + 0.005);
}

}  // TEST_SUITE
