#pragma once

#include <functional>

namespace coalforge::quadrature {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;  // Kronrod-Gauss discrepancy summed over subintervals
  int evaluations = 0;
  bool converged = false;
};

struct Tolerance {
  double absolute = 1e-11;
  double relative = 1e-11;
  int max_subdivisions = 4000;
};

// Globally adaptive 7/15-point Gauss-Kronrod on a finite interval. The
// subinterval with the largest error estimate is bisected until the total
// estimate drops below max(absolute, relative * |value|).
Result gauss_kronrod(const Integrand& f, double lo, double hi,
                     const Tolerance& tol = {});

// Integral over (0, 1) of g(u) u^p (1-u)^q, with g smooth and p, q > -1.
// The two halves are mapped by u = s^m / 2 and u = 1 - t^m / 2 with m chosen
// from the exponent so that the transformed integrands are bounded.
Result beta_type(const Integrand& g, double p, double q,
                 const Tolerance& tol = {});

// Integral over (0, inf) via theta = t / (1 - t), t = s^2. The s^2 step
// absorbs theta^{-1/2} behaviour at the origin.
Result semi_infinite(const Integrand& f, const Tolerance& tol = {});

}  // namespace coalforge::quadrature
