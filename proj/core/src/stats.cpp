#include "coalforge/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace coalforge::stats {

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::domain_error("ks_statistic: empty sample");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;  // ties jump together
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return d;
}

double chi_square_survival(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquare chi_square(std::span<const long long> observed, std::span<const double> expected,
                     double min_expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::domain_error("chi_square: observed and expected differ in size");
  }
  const double total_obs = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double total_p = std::accumulate(expected.begin(), expected.end(), 0.0);
  if (!(total_p > 0.0)) throw std::domain_error("chi_square: zero expected mass");
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 0.0) throw std::domain_error("chi_square: negative probability");
    if (expected[i] == 0.0 && observed[i] > 0) {
      throw std::domain_error("chi_square: observation in a cell of zero expected mass");
    }
  }
  // Merge runs of adjacent cells until each expected count reaches the floor;
  // a short trailing run joins the previous cell.
  std::vector<double> obs_cells;
  std::vector<double> exp_cells;
  double o = 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += expected[i] / total_p * total_obs;
    if (e >= min_expected) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
    } else {
      obs_cells.back() += o;
      exp_cells.back() += e;
    }
  }
  ChiSquare out;
  out.cells = static_cast<int>(obs_cells.size());
  for (std::size_t i = 0; i < obs_cells.size(); ++i) {
    const double diff = obs_cells[i] - exp_cells[i];
    out.statistic += diff * diff / exp_cells[i];
  }
  out.dof = out.cells - 1;
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_two_sample(std::span<const long long> a, std::span<const long long> b,
                                double min_expected) {
  if (a.size() != b.size() || a.empty()) throw std::domain_error("chi_square_two_sample: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(na > 0.0 && nb > 0.0)) throw std::domain_error("chi_square_two_sample: empty sample");
  const double total = na + nb;
  // Merge adjacent cells on the pooled count so both expected counts clear the floor.
  std::vector<std::pair<double, double>> cells;
  double ca = 0.0;
  double cb = 0.0;
  const double floor_pooled = min_expected * total / std::min(na, nb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += static_cast<double>(a[i]);
    cb += static_cast<double>(b[i]);
    if (ca + cb >= floor_pooled) {
      cells.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(ca, cb);
    } else {
      cells.back().first += ca;
      cells.back().second += cb;
    }
  }
  ChiSquare out;
  out.cells = static_cast<int>(cells.size());
  for (const auto& [x, y] : cells) {
    const double pooled = x + y;
    const double ea = pooled * na / total;
    const double eb = pooled * nb / total;
    out.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  out.dof = out.cells - 1;
  out.p_value = chi_square_survival(out.statistic, out.dof);
  return out;
}

double rayleigh_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

MeanEstimate mean_with_stderr(std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("mean_with_stderr: empty sample");
  MeanEstimate out;
  out.count = xs.size();
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return out;
}

RetryOutcome with_retries(const std::function<double(int)>& p_value_of_attempt, double significance) {
  RetryOutcome out;
  // Majority of three, stopping once decided.
  for (int attempt = 0; attempt < 3; ++attempt) {
    const double p = p_value_of_attempt(attempt);
    out.p_values.push_back(p);
    ++out.attempts;
    if (p < significance) ++out.failures;
    if (out.failures >= 2 || out.attempts - out.failures >= 2) break;
  }
  out.pass = out.failures < 2;
  return out;
}

Histogram histogram(std::span<const double> xs, int bins) {
  if (xs.empty() || bins < 1) throw std::domain_error("histogram: empty sample or no bins");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double lo = *lo_it;
  const double hi = *hi_it > lo ? *hi_it : lo + 1.0;
  const double width = (hi - lo) / bins;
  Histogram h;
  h.count.assign(bins, 0);
  for (int b = 0; b < bins; ++b) {
    h.low.push_back(lo + b * width);
    h.high.push_back(b + 1 == bins ? hi : lo + (b + 1) * width);
  }
  for (double x : xs) {
    const int b = std::min(bins - 1, static_cast<int>((x - lo) / width));
    ++h.count[b];
  }
  return h;
}

Histogram integer_histogram(std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("integer_histogram: empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const long long lo = std::llround(*lo_it);
  const long long hi = std::llround(*hi_it);
  Histogram h;
  h.count.assign(hi - lo + 1, 0);
  for (long long k = lo; k <= hi; ++k) {
    h.low.push_back(static_cast<double>(k));
    h.high.push_back(static_cast<double>(k + 1));
  }
  for (double x : xs) ++h.count[std::llround(x) - lo];
  return h;
}

void write_csv(std::ostream& os, const Histogram& h) {
  os << "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < h.count.size(); ++i) os << h.low[i] << ',' << h.high[i] << ',' << h.count[i] << '\n';
}

}  // namespace coalforge::stats
