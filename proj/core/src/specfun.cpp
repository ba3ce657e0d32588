#include "coalforge/specfun.hpp"

#include "coalforge/quadrature.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace coalforge::specfun {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

double trim_double(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("not a number: " + std::string(text));
  }
  return value;
}

// atanh(sqrt(z)) / sqrt(z), continued to z < 0 as atan(sqrt(-z)) / sqrt(-z).
double atanh_ratio(double z) {
  if (std::abs(z) < 1e-3) {
    return 1.0 + z * (1.0 / 3 + z * (1.0 / 5 + z * (1.0 / 7 + z * (1.0 / 9 + z / 11))));
  }
  if (z > 0.0) {
    const double s = std::sqrt(z);
    return std::atanh(s) / s;
  }
  const double s = std::sqrt(-z);
  return std::atan(s) / s;
}

Complex atanh_ratio(Complex z) {
  if (std::abs(z) < 1e-3) {
    return 1.0 + z * (1.0 / 3 + z * (1.0 / 5 + z * (1.0 / 7 + z * (1.0 / 9 + z / 11.0))));
  }
  const Complex s = std::sqrt(z);
  return std::atanh(s) / s;
}

double checked(const quadrature::Result& r, const char* what) {
  if (!r.converged || !std::isfinite(r.value)) {
    throw PrecisionError(std::string(what) + ": quadrature did not converge");
  }
  return r.value;
}

const quadrature::Tolerance kIdentityTol{1e-13, 1e-12, 4000};

}  // namespace

// ---------------------------------------------------------------------------

double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), "log_gamma: argument must be positive");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double y = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (y + i);
  const double t = y + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (y + 0.5) * std::log(t) - t +
         std::log(sum);
}

double gamma_fn(double x) { return std::exp(log_gamma(x)); }

double log_beta(double a, double b) {
  require(a > 0.0 && b > 0.0, "beta: arguments must be positive");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

double log_binomial(int n, int k) {
  require(n >= 0 && k >= 0 && k <= n, "binomial: need 0 <= k <= n");
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double binomial(int n, int k) {
  require(n >= 0 && k >= 0 && k <= n, "binomial: need 0 <= k <= n");
  if (n <= 60) {
    double out = 1.0;
    for (int i = 1; i <= std::min(k, n - k); ++i) out = out * (n - i + 1) / i;
    return std::round(out);
  }
  return std::exp(log_binomial(n, k));
}

BigInt catalan_trees(int n) {
  require(n >= 1 && n <= 30, "catalan_trees: need 1 <= n <= 30");
  BigInt out = 1;
  for (int i = n; i <= 2 * n - 2; ++i) out *= i;
  return out;
}

// ---------------------------------------------------------------------------

LambdaMeasure LambdaMeasure::beta(double a, double b) {
  require(a > 0.0 && b > 0.0, "LambdaMeasure: beta parameters must be positive");
  return {Kind::beta, a, b};
}

LambdaMeasure LambdaMeasure::parse(std::string_view text) {
  if (text == "kingman") return kingman();
  if (text == "uniform" || text == "bolthausen-sznitman") return uniform();
  if (text.starts_with("beta:")) {
    text.remove_prefix(5);
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("beta measure needs two parameters: beta:A,B");
    }
    return beta(trim_double(text.substr(0, comma)), trim_double(text.substr(comma + 1)));
  }
  throw std::invalid_argument("unknown measure: " + std::string(text));
}

std::string LambdaMeasure::to_string() const {
  switch (kind) {
    case Kind::kingman: return "kingman";
    case Kind::uniform: return "uniform";
    case Kind::beta: {
      std::ostringstream os;
      os << "beta:" << a << ',' << b;
      return os.str();
    }
  }
  return "?";
}

double LambdaMeasure::density(double u) const {
  switch (kind) {
    case Kind::kingman: throw std::domain_error("Kingman measure has no density");
    case Kind::uniform: return (u > 0.0 && u < 1.0) ? 1.0 : 0.0;
    case Kind::beta:
      if (!(u > 0.0 && u < 1.0)) return 0.0;
      return std::pow(u, a - 1.0) * std::pow(1.0 - u, b - 1.0);
  }
  return 0.0;
}

bool LambdaMeasure::is_pruning_beta() const {
  return kind == Kind::beta && a == 1.5 && b == 0.5;
}

double rate_nk(int n, int k) {
  require(n >= 2 && k >= 2 && k <= n, "rate_nk: need 2 <= k <= n");
  return beta_fn(k - 0.5, n - k + 0.5);
}

double rate_total(int n) {
  require(n >= 2, "rate_total: need n >= 2");
  return (n - 1) * beta_fn(0.5, n - 0.5);
}

double rate_bk_general(const LambdaMeasure& measure, int b, int k) {
  require(b >= 2 && k >= 2 && k <= b, "rate_bk_general: need 2 <= k <= b");
  double p = k - 2.0;
  double q = b - k;
  switch (measure.kind) {
    case LambdaMeasure::Kind::kingman: return k == 2 ? 1.0 : 0.0;
    case LambdaMeasure::Kind::uniform: break;
    case LambdaMeasure::Kind::beta:
      p += measure.a - 1.0;
      q += measure.b - 1.0;
      break;
  }
  require(p > -1.0 && q > -1.0, "rate_bk_general: integrand is not integrable");
  const quadrature::Tolerance tol{0.0, 1e-12, 4000};
  return checked(quadrature::beta_type([](double) { return 1.0; }, p, q, tol),
                 "rate_bk_general");
}

double laplace_exponent(double lam) {
  require(lam > 0.0, "laplace_exponent: need lam > 0");
  return 2.0 * std::sqrt(std::numbers::pi) *
         std::exp(log_gamma(lam + 0.5) - log_gamma(lam));
}

double laplace_exponent_quadrature(double lam) {
  require(lam > 0.0, "laplace_exponent: need lam > 0");
  auto g = [lam](double u) { return -std::expm1(lam * std::log1p(-u)) / u; };
  return checked(quadrature::beta_type(g, -0.5, -0.5, kIdentityTol),
                 "laplace_exponent_quadrature");
}

// ---------------------------------------------------------------------------

double delta0(double a, double b) {
  require(a >= 0.0 && b >= 0.0, "delta0: arguments must be nonnegative");
  require(a + b > 0.0, "delta0: undefined at (0,0)");
  const double c = 1.0 + std::sqrt(b);
  const double d = 1.0 + b - 2.0 * a;
  if (std::abs(d) < kDelta0DegenerateThreshold) return 2.0 / c;
  return 2.0 / c * atanh_ratio(d / (c * c));
}

Complex delta0(Complex a, Complex b) {
  const Complex c = 1.0 + std::sqrt(b);
  const Complex d = 1.0 + b - 2.0 * a;
  if (c == Complex{0.0}) throw std::domain_error("delta0: 1 + sqrt(b) vanishes");
  return 2.0 / c * atanh_ratio(d / (c * c));
}

double i_func(double a, double b) {
  require(a >= 0.0 && b >= 0.0, "i_func: arguments must be nonnegative");
  if (a == 0.0 && b == 0.0) return 1.0;
  return 1.0 + std::numbers::ln2 - std::log(std::sqrt(b) + a) - delta0(a, b);
}

Complex i_func(Complex a, Complex b) {
  if (a == Complex{0.0} && b == Complex{0.0}) return 1.0;
  const Complex w = std::sqrt(b) + a;
  if (w.imag() == 0.0 && w.real() <= 0.0) {
    throw std::domain_error("i_func: sqrt(b) + a on the branch cut of log");
  }
  return 1.0 + std::numbers::ln2 - std::log(w) - delta0(a, b);
}

double quad_J(double a, double b) {
  require(a >= 0.0 && b >= 0.0, "quad_J: arguments must be nonnegative");
  // theta/sqrt(Q) - theta/(theta+1) rewritten without cancellation.
  auto f = [a, b](double th) {
    const double root = std::sqrt(th * th + 2.0 * a * th + b);
    const double up = th + 1.0;
    if (root == 0.0) return 1.0;  // a = b = 0, theta = 0
    return th * ((2.0 - 2.0 * a) * th + 1.0 - b) / (root * up * up * (up + root));
  };
  return checked(quadrature::semi_infinite(f, kIdentityTol), "quad_J");
}

double quad_delta(double a, double b) {
  require(a >= 0.0 && b >= 0.0 && a + b > 0.0, "quad_delta: need a,b >= 0, a+b > 0");
  auto f = [a, b](double th) {
    return 1.0 / ((th + 1.0) * std::sqrt(th * th + 2.0 * a * th + b));
  };
  return checked(quadrature::semi_infinite(f, kIdentityTol), "quad_delta");
}

double quad_three_halves_weighted(double a, double b) {
  require(a >= 0.0 && b >= 0.0 && a + b > 0.0, "need a,b >= 0, a+b > 0");
  auto f = [a, b](double th) {
    const double q = th * th + 2.0 * a * th + b;
    return th / (q * std::sqrt(q));
  };
  return checked(quadrature::semi_infinite(f, kIdentityTol), "quad_three_halves_weighted");
}

double quad_three_halves(double a, double b) {
  require(a >= 0.0 && b > 0.0, "need a >= 0, b > 0");
  auto f = [a, b](double th) {
    const double q = th * th + 2.0 * a * th + b;
    return 1.0 / (q * std::sqrt(q));
  };
  return checked(quadrature::semi_infinite(f, kIdentityTol), "quad_three_halves");
}

// ---------------------------------------------------------------------------

DeltaCoeffs DeltaCoeffs::compute(double theta, double lambda, double alpha,
                                 double rho, double rho0, double rho1) {
  require(theta > 0.0 && lambda > 0.0 && alpha > 0.0,
          "DeltaCoeffs: theta, lambda, alpha must be positive");
  for (double r : {rho, rho0, rho1}) {
    require(r >= 0.0 && r <= 1.0, "DeltaCoeffs: generating arguments must lie in [0,1]");
  }
  const double ratio = lambda / alpha;
  const double root = std::sqrt(ratio);
  DeltaCoeffs c;
  c.theta = theta;
  c.lambda = lambda;
  c.alpha = alpha;
  c.delta0 = theta * theta + ratio + 2.0 * theta * root * (1.0 - rho);
  c.delta1 = theta * rho * root;
  c.delta2 = ratio * rho0 - theta * root * (rho - rho1);
  return c;
}

double f_theta(double a, const DeltaCoeffs& c) {
  require(a >= 0.0 && a <= 1.0, "f_theta: need a in [0,1]");
  const double radicand = c.delta0 + 2.0 * c.delta1 * std::sqrt(1.0 - a) - c.delta2 * a;
  if (!(radicand > 0.0)) {
    throw InvariantViolation("f_theta: radicand is not positive; delta coefficients are inconsistent");
  }
  return c.theta + std::sqrt(c.lambda / c.alpha) - std::sqrt(radicand);
}

double sigma_moment(int n, double lam, double alpha) {
  require(n >= 1 && lam > 0.0 && alpha > 0.0, "sigma_moment: need n >= 1, lam, alpha > 0");
  return std::exp(log_gamma(n - 0.5) - (n - 0.5) * std::log(lam)) /
         (2.0 * std::sqrt(alpha * std::numbers::pi));
}

double leaf_count_mass(int k, double lam, double alpha) {
  require(k >= 1 && lam > 0.0 && alpha > 0.0, "leaf_count_mass: need k >= 1, lam, alpha > 0");
  return std::sqrt(lam / alpha) / (2.0 * std::sqrt(std::numbers::pi)) *
         std::exp(log_gamma(k - 0.5) - log_gamma(k + 1.0));
}

}  // namespace coalforge::specfun
