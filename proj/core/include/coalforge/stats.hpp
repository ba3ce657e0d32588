#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

namespace coalforge::stats {

/// sup |F_n - F| over the sample; the samples are copied and sorted.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells = 0;  // after merging
};

/// Pearson goodness of fit. Adjacent cells are merged until every expected
/// count is at least `min_expected`. Probabilities are renormalized.
ChiSquare chi_square(std::span<const long long> observed, std::span<const double> expected,
                     double min_expected = 5.0);

/// Homogeneity test of two count vectors over the same cells.
ChiSquare chi_square_two_sample(std::span<const long long> a, std::span<const long long> b,
                                double min_expected = 5.0);

/// Upper tail of the chi-square distribution.
double chi_square_survival(double statistic, int dof);

double rayleigh_cdf(double x);
double normal_cdf(double x);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

MeanEstimate mean_with_stderr(std::span<const double> xs);

/// Evaluates a chi-square gate up to three times on fresh seeds; fails once
/// two attempts fail.
struct RetryOutcome {
  bool pass = false;
  int attempts = 0;
  int failures = 0;
  std::vector<double> p_values;
};

RetryOutcome with_retries(const std::function<double(int attempt)>& p_value_of_attempt,
                          double significance = 1e-3);

struct Histogram {
  std::vector<double> low;
  std::vector<double> high;
  std::vector<long long> count;
};

/// `bins` equal-width bins over [min, max] of the sample.
Histogram histogram(std::span<const double> xs, int bins);
/// Unit bins [k, k+1) over the integer range of the sample.
Histogram integer_histogram(std::span<const double> xs);
/// Columns bin_low, bin_high, count.
void write_csv(std::ostream& os, const Histogram& h);

}  // namespace coalforge::stats
