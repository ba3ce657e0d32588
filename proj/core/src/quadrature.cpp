#include "coalforge/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace coalforge::quadrature {
namespace {

// Kronrod abscissae (descending, last is the centre) and weights; Gauss
// weights belong to the odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment apply_rule(const Integrand& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

int power_for_exponent(double p) {
  // smallest m >= 1 with m (p + 1) - 1 >= 1
  return std::max(1, static_cast<int>(std::ceil(2.0 / (p + 1.0))));
}

}  // namespace

Result gauss_kronrod(const Integrand& f, double lo, double hi,
                     const Tolerance& tol) {
  Result out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> queue;
  Segment first = apply_rule(f, lo, hi);
  out.evaluations = 15;
  double total = first.value;
  double error = first.error;
  queue.push(first);
  int subdivisions = 0;
  while (error > std::max(tol.absolute, tol.relative * std::abs(total)) &&
         subdivisions < tol.max_subdivisions) {
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      queue.push(worst);
      break;  // interval exhausted in floating point
    }
    Segment left = apply_rule(f, worst.lo, mid);
    Segment right = apply_rule(f, mid, worst.hi);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++subdivisions;
  }
  // Resum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  std::vector<Segment> parts;
  parts.reserve(queue.size());
  while (!queue.empty()) {
    parts.push_back(queue.top());
    queue.pop();
  }
  std::sort(parts.begin(), parts.end(),
            [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  for (const auto& s : parts) {
    total += s.value;
    error += s.error;
  }
  out.value = total;
  out.error = error;
  out.converged = error <= std::max(tol.absolute, tol.relative * std::abs(total));
  return out;
}

Result beta_type(const Integrand& g, double p, double q, const Tolerance& tol) {
  const int m0 = power_for_exponent(p);
  const int m1 = power_for_exponent(q);
  // u = s^m0 / 2 on the left half, du = m0 s^{m0-1} / 2 ds.
  auto left = [&](double s) {
    const double sm1 = std::pow(s, m0 - 1);
    const double u = 0.5 * sm1 * s;
    if (u <= 0.0) return 0.0;
    return g(u) * std::pow(u, p) * std::pow(1.0 - u, q) * 0.5 * m0 * sm1;
  };
  // u = 1 - t^m1 / 2 on the right half.
  auto right = [&](double t) {
    const double tm1 = std::pow(t, m1 - 1);
    const double w = 0.5 * tm1 * t;  // 1 - u
    if (w <= 0.0) return 0.0;
    return g(1.0 - w) * std::pow(1.0 - w, p) * std::pow(w, q) * 0.5 * m1 * tm1;
  };
  Tolerance half_tol = tol;
  half_tol.absolute = 0.5 * tol.absolute;
  Result a = gauss_kronrod(left, 0.0, 1.0, half_tol);
  Result b = gauss_kronrod(right, 0.0, 1.0, half_tol);
  return {a.value + b.value, a.error + b.error, a.evaluations + b.evaluations,
          a.converged && b.converged};
}

Result semi_infinite(const Integrand& f, const Tolerance& tol) {
  auto mapped = [&](double s) {
    const double t = s * s;
    const double one_minus = 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    const double theta = t / one_minus;
    const double jacobian = 2.0 * s / (one_minus * one_minus);
    const double value = f(theta);
    return value == 0.0 ? 0.0 : value * jacobian;
  };
  return gauss_kronrod(mapped, 0.0, 1.0, tol);
}

}  // namespace coalforge::quadrature
