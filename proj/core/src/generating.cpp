#include "coalforge/specfun.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace coalforge::specfun {
namespace {

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(what);
}

void require_disc(Complex z, const char* what) {
  if (!(std::abs(z) <= 1.0 + 1e-15)) throw std::domain_error(what);
}

// Phi written as rho (1 + 2 log 2) - (rho + s) log(c + s) - (rho - s) log(c - s)
// with s = sqrt(rho), c = 1 + sqrt(1 - rho_*); this uses
// c - (rho + rho_*)/2 = (c - s)(c + s)/2. The expression is even in s, so
// the branch of sqrt(rho) is immaterial; only log(c - s) can meet its cut.
Complex phi_impl(Complex rho, Complex rho_star) {
  const Complex s = std::sqrt(rho);
  const Complex c = 1.0 + std::sqrt(1.0 - rho_star);
  const Complex lower = c - s;
  const Complex lower_weight = rho - s;
  Complex lower_term{0.0};
  if (lower.imag() == 0.0 && lower.real() <= 0.0) {
    // Only (1,1) touches the cut, where the weight vanishes with it.
    if (!(lower == Complex{0.0} && std::abs(lower_weight) == 0.0)) {
      throw std::domain_error("gf_phi: 1 + sqrt(1 - rho_*) - sqrt(rho) on the branch cut");
    }
  } else {
    lower_term = lower_weight * std::log(lower);
  }
  return rho * (1.0 + 2.0 * std::numbers::ln2) - (rho + s) * std::log(c + s) - lower_term;
}

std::vector<Complex> circle_values(const Pgf& pgf, double radius, int points) {
  std::vector<Complex> values(points);
  for (int j = 0; j < points; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / points;
    values[j] = pgf(std::polar(radius, angle));
  }
  return values;
}

std::vector<Complex> invert(const std::vector<Complex>& values, double radius, int kmax) {
  const int n = static_cast<int>(values.size());
  std::vector<Complex> twiddle(n);
  for (int j = 0; j < n; ++j) twiddle[j] = std::polar(1.0, -2.0 * std::numbers::pi * j / n);
  std::vector<Complex> coeffs(kmax + 1);
  double scale = 1.0 / n;
  for (int k = 0; k <= kmax; ++k) {
    Complex acc{0.0};
    std::size_t idx = 0;
    for (int j = 0; j < n; ++j) {
      acc += values[j] * twiddle[idx];
      idx += k;
      if (idx >= static_cast<std::size_t>(n)) idx -= n;
    }
    coeffs[k] = acc * scale;
    scale /= radius;
  }
  return coeffs;
}

}  // namespace

double gf_phi(double rho, double rho_star) {
  require_unit(rho, "gf_phi: rho must lie in [0,1]");
  require_unit(rho_star, "gf_phi: rho_* must lie in [0,1]");
  return phi_impl(Complex{rho}, Complex{rho_star}).real();
}

Complex gf_phi(Complex rho, Complex rho_star) {
  require_disc(rho, "gf_phi: rho outside the closed unit disc");
  require_disc(rho_star, "gf_phi: rho_* outside the closed unit disc");
  return phi_impl(rho, rho_star);
}

double gf_psi(double rho, double rho0, double rho1) {
  require_unit(rho, "gf_psi: rho must lie in [0,1]");
  require_unit(rho0, "gf_psi: rho0 must lie in [0,1]");
  require_unit(rho1, "gf_psi: rho1 must lie in [0,1]");
  // Clamp rounding: a and b are nonnegative in exact arithmetic.
  const double a = std::max(0.0, 1.0 - 0.5 * (rho + rho1));
  const double b = std::max(0.0, 1.0 - rho0);
  return rho * i_func(a, b);
}

Complex gf_psi(Complex rho, Complex rho0, Complex rho1) {
  require_disc(rho, "gf_psi: rho outside the closed unit disc");
  require_disc(rho0, "gf_psi: rho0 outside the closed unit disc");
  require_disc(rho1, "gf_psi: rho1 outside the closed unit disc");
  return rho * i_func(1.0 - 0.5 * (rho + rho1), 1.0 - rho0);
}

PgfCoefficients pgf_extract(const Pgf& pgf, int kmax, double radius, double tolerance) {
  if (kmax < 0 || kmax > 512) throw std::domain_error("pgf_extract: need 0 <= kmax <= 512");
  if (!(radius > 0.0 && radius < 1.0)) throw std::domain_error("pgf_extract: need radius in (0,1)");
  const double check_radius = std::sqrt(radius);
  // Aliased terms scale like check_radius^points; push them below roundoff.
  const double alias_points = std::min(std::log(1e-17) / std::log(check_radius), 65536.0);
  const int points = static_cast<int>(std::bit_ceil(
      static_cast<unsigned>(std::max({8 * kmax, 64, static_cast<int>(std::ceil(alias_points))}))));

  const auto main = invert(circle_values(pgf, radius, points), radius, kmax);
  const auto check = invert(circle_values(pgf, check_radius, points), check_radius, kmax);

  PgfCoefficients out;
  out.radius = radius;
  out.check_radius = check_radius;
  out.points = points;
  out.p.resize(kmax + 1);
  out.error.resize(kmax + 1);
  double most_negative = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    out.p[k] = main[k].real();
    out.error[k] = std::abs(main[k] - check[k]);
    out.max_error = std::max(out.max_error, out.error[k]);
    out.max_imag_residue = std::max(out.max_imag_residue, std::abs(main[k].imag()));
    most_negative = std::min(most_negative, out.p[k]);
  }
  if (out.max_error > tolerance) {
    std::ostringstream os;
    os << "pgf_extract: error estimate " << out.max_error << " exceeds tolerance " << tolerance
       << " (radius " << radius << ", kmax " << kmax << "); use a radius closer to 1";
    throw PrecisionError(os.str());
  }
  if (out.max_imag_residue > 1e-9) {
    throw PrecisionError("pgf_extract: coefficients are not real");
  }
  if (most_negative < -1e-9) {
    throw PrecisionError("pgf_extract: negative coefficient; not a probability generating function");
  }
  return out;
}

}  // namespace coalforge::specfun
