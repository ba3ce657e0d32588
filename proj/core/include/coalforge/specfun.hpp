#pragma once

// Exact-math core: merger rates of the beta(3/2,1/2)-coalescent and of
// general Lambda-coalescents, tree counting constants, and the special
// functions behind the last-event generating functions.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>
#include <string>
#include <string_view>

namespace coalforge::specfun {

using BigInt = boost::multiprecision::cpp_int;
using Complex = std::complex<double>;

/// Raised when an iterative numerical procedure cannot certify its result.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an internal invariant that the mathematics guarantees is
/// violated; always indicates a coefficient or caller bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Gamma / beta

/// Natural log of Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms).
double log_gamma(double x);
double gamma_fn(double x);
double beta_fn(double a, double b);
double log_beta(double a, double b);
double log_binomial(int n, int k);
double binomial(int n, int k);

/// Number of ordered binary trees with n labelled leaves, (2n-2)!/(n-1)!.
/// Exact for 1 <= n <= 30.
BigInt catalan_trees(int n);

// ---------------------------------------------------------------------------
// Lambda measures and rates

struct LambdaMeasure {
  enum class Kind { kingman, uniform, beta };

  Kind kind = Kind::kingman;
  double a = 1.0;  // beta parameters; unused for the other kinds
  double b = 1.0;

  static LambdaMeasure kingman() { return {Kind::kingman, 1.0, 1.0}; }
  static LambdaMeasure uniform() { return {Kind::uniform, 1.0, 1.0}; }
  static LambdaMeasure beta(double a, double b);
  /// The measure sqrt(u/(1-u)) du of the tree-pruning coalescent.
  static LambdaMeasure pruning() { return beta(1.5, 0.5); }

  /// Parses "kingman", "uniform" / "bolthausen-sznitman", "beta:A,B".
  static LambdaMeasure parse(std::string_view text);
  std::string to_string() const;

  /// Unnormalized density u^{a-1}(1-u)^{b-1} (1 for uniform). Throws for
  /// Kingman, which has no density.
  double density(double u) const;
  bool is_pruning_beta() const;
};

/// Rate at which k fixed blocks out of n merge for Lambda(du) = sqrt(u/(1-u))du:
/// beta(k - 1/2, n - k + 1/2).
double rate_nk(int n, int k);
/// Total event rate from n blocks: (n-1) beta(1/2, n-1/2).
double rate_total(int n);
/// lambda_{b,k} = int u^{k-2}(1-u)^{b-k} Lambda(du) by adaptive quadrature.
double rate_bk_general(const LambdaMeasure& measure, int b, int k);

/// Laplace exponent 2 sqrt(pi) Gamma(lam + 1/2) / Gamma(lam).
double laplace_exponent(double lam);
/// The defining integral int (1-(1-u)^lam) u^{-3/2}(1-u)^{-1/2} du.
double laplace_exponent_quadrature(double lam);

// ---------------------------------------------------------------------------
// Delta_0, I and their integral representations

/// Threshold on |1 + b - 2a| below which delta0 uses its degenerate branch.
inline constexpr double kDelta0DegenerateThreshold = 1e-9;

double delta0(double a, double b);
Complex delta0(Complex a, Complex b);
double i_func(double a, double b);
Complex i_func(Complex a, Complex b);

/// J(a,b) = int_0^inf dth/(th+1) (th/sqrt(th^2+2a th+b) - th/(th+1)).
double quad_J(double a, double b);
/// Delta(a,b) = int_0^inf dth / ((th+1) sqrt(th^2+2a th+b)).
double quad_delta(double a, double b);
/// int_0^inf th dth / (th^2+2a th+b)^{3/2}; closed form 1/(sqrt(b)+a).
double quad_three_halves_weighted(double a, double b);
/// int_0^inf dth / (th^2+2a th+b)^{3/2}; closed form 1/(sqrt(b)(sqrt(b)+a)).
double quad_three_halves(double a, double b);

// ---------------------------------------------------------------------------
// Generating functions of the last coalescent event

struct GfPoint {
  double rho = 1.0;
  double rho0 = 1.0;  // rho_* for Phi
  double rho1 = 1.0;
};

/// Phi(rho, rho_*) = E[rho^{B-E} rho_*^E], evaluated from its closed form.
double gf_phi(double rho, double rho_star);
Complex gf_phi(Complex rho, Complex rho_star);
/// Psi(rho, rho0, rho1) = E[rho^{U-V} rho0^{V-W} rho1^W] = rho I(1-(rho+rho1)/2, 1-rho0).
double gf_psi(double rho, double rho0, double rho1);
Complex gf_psi(Complex rho, Complex rho0, Complex rho1);
inline double gf_psi(const GfPoint& p) { return gf_psi(p.rho, p.rho0, p.rho1); }

using Pgf = std::function<Complex(Complex)>;

struct PgfCoefficients {
  std::vector<double> p;      // p_0 .. p_kmax
  std::vector<double> error;  // per-coefficient deviation between the two radii
  double max_error = 0.0;
  double max_imag_residue = 0.0;
  double radius = 0.0;
  double check_radius = 0.0;
  int points = 0;
};

/// Coefficients of a probability generating function by discrete Fourier
/// inversion on the circle |z| = radius, with N >= 8 kmax points. The error
/// estimate compares against a second run at radius sqrt(radius). Throws
/// PrecisionError when it exceeds `tolerance`, or when the coefficients are
/// not real / nonnegative to within 1e-9.
PgfCoefficients pgf_extract(const Pgf& pgf, int kmax, double radius = 0.5,
                            double tolerance = 1e-8);

// ---------------------------------------------------------------------------
// Joint transform f_theta and the mass moments

struct DeltaCoeffs {
  double delta0 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;

  static DeltaCoeffs compute(double theta, double lambda, double alpha,
                             double rho, double rho0, double rho1);
};

/// theta + sqrt(lambda/alpha) - sqrt(delta0 + 2 delta1 sqrt(1-a) - delta2 a).
double f_theta(double a, const DeltaCoeffs& coeffs);

/// N[sigma^n e^{-lam sigma}] = Gamma(n - 1/2) / (2 sqrt(alpha pi) lam^{n-1/2}).
double sigma_moment(int n, double lam, double alpha);
/// N[Ntilde = k] for Poisson(lam * sigma) leaves on a tree of mass sigma.
double leaf_count_mass(int k, double lam, double alpha);

}  // namespace coalforge::specfun
