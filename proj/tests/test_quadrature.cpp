#include "coalforge/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace coalforge::quadrature;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth integrands") {
  const auto cubic = gauss_kronrod([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0);
  CHECK(cubic.converged);
  CHECK(cubic.value == doctest::Approx(2.0).epsilon(1e-14));
  const auto e = gauss_kronrod([](double x) { return std::exp(x); }, -1.0, 3.0);
  CHECK(e.value == doctest::Approx(std::exp(3.0) - std::exp(-1.0)).epsilon(1e-13));
  CHECK(gauss_kronrod([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("endpoint singularities") {
  for (double p : {-0.5, -0.9, 0.3, 2.0})
    for (double q : {-0.5, -0.2, 1.5}) {
      const auto r = beta_type([](double) { return 1.0; }, p, q);
      const double oracle = std::exp(std::lgamma(p + 1) + std::lgamma(q + 1) - std::lgamma(p + q + 2));
      CHECK(r.converged);
      CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("semi-infinite range") {
  CHECK(semi_infinite([](double x) { return std::exp(-x); }).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(semi_infinite([](double x) { return 1 / (1 + x * x); }).value ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));
}

TEST_CASE("non-convergence is reported") {
  const auto r = gauss_kronrod([](double x) { return std::sin(1 / x); }, 1e-300, 1.0, {1e-15, 1e-15, 3});
  CHECK_FALSE(r.converged);
}

}  // TEST_SUITE
