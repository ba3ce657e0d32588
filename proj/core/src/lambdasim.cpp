#include "coalforge/lambdasim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coalforge::lambda {

using specfun::LambdaMeasure;

RateTable RateTable::build(const LambdaMeasure& measure, int n_max) {
  if (n_max < 2) throw std::domain_error("build_table: need n_max >= 2");
  const bool closed_form = measure.is_pruning_beta();
  const bool kingman = measure.kind == LambdaMeasure::Kind::kingman;
  if ((closed_form || kingman) ? n_max > 10000 : n_max > 200) {
    throw std::domain_error("build_table: n_max too large for this measure");
  }
  RateTable t;
  t.measure_ = measure;
  t.n_max_ = n_max;
  const std::size_t entries = index(n_max, n_max) + 1;
  t.rates_.assign(entries, 0.0);
  t.cumulative_.assign(entries, 0.0);
  t.totals_.assign(n_max + 1, 0.0);

  for (int b = 2; b <= n_max; ++b) {
    std::vector<double> mass(b + 1, 0.0);  // C(b,k) lambda_{b,k} / lambda_b
    if (kingman) {
      t.rates_[index(b, 2)] = 1.0;
      t.totals_[b] = specfun::binomial(b, 2);
      mass[2] = 1.0;
    } else if (closed_form) {
      t.totals_[b] = specfun::rate_total(b);
      const double log_total = std::log(t.totals_[b]);
      for (int k = 2; k <= b; ++k) {
        const double log_rate = specfun::log_beta(k - 0.5, b - k + 0.5);
        t.rates_[index(b, k)] = std::exp(log_rate);
        mass[k] = std::exp(specfun::log_binomial(b, k) + log_rate - log_total);
      }
    } else {
      double total = 0.0;
      for (int k = 2; k <= b; ++k) {
        double r = 0.0;
        try {
          r = specfun::rate_bk_general(measure, b, k);
        } catch (const std::exception& e) {
          std::ostringstream os;
          os << "build_table: rate (b=" << b << ", k=" << k << ") failed: " << e.what();
          throw std::runtime_error(os.str());
        }
        t.rates_[index(b, k)] = r;
        mass[k] = specfun::binomial(b, k) * r;
        total += mass[k];
      }
      t.totals_[b] = total;
      for (int k = 2; k <= b; ++k) mass[k] /= total;
    }
    double running = 0.0;
    for (int k = 2; k <= b; ++k) {
      running += mass[k];
      t.cumulative_[index(b, k)] = running;
    }
    t.cumulative_[index(b, b)] = 1.0;
  }
  return t;
}

double RateTable::merger_probability(int b, int k) const {
  if (b < 2 || b > n_max_ || k < 2 || k > b) throw std::domain_error("merger_probability: bad (b,k)");
  const double upper = cumulative_[index(b, k)];
  const double lower = k == 2 ? 0.0 : cumulative_[index(b, k - 1)];
  return upper - lower;
}

int RateTable::sample_merger_size(int b, Rng& rng) const {
  const auto first = cumulative_.begin() + static_cast<std::ptrdiff_t>(index(b, 2));
  const auto last = first + (b - 1);
  const double u = uniform_open(rng);
  const auto it = std::upper_bound(first, last, u);
  return 2 + static_cast<int>(std::min<std::ptrdiff_t>(it - first, b - 2));
}

MergeStep sample_merge(int b, const RateTable& table, Rng& rng) {
  if (b < 2 || b > table.n_max()) throw std::domain_error("sample_merge: block count outside table");
  MergeStep step;
  step.k = table.sample_merger_size(b, rng);
  std::vector<std::size_t> positions(b);
  for (int i = 0; i < b; ++i) positions[i] = i;
  for (int i = 0; i < step.k; ++i) {
    std::uniform_int_distribution<int> pick(i, b - 1);
    std::swap(positions[i], positions[pick(rng)]);
  }
  step.chosen.assign(positions.begin(), positions.begin() + step.k);
  return step;
}

EventLog run_lambda_chain(int n, const RateTable& table, Rng& rng,
                          const LambdaChainOptions& options) {
  if (n < 2 || n > table.n_max()) throw std::domain_error("run_lambda_chain: need 2 <= n <= n_max");
  Partition state = Partition::singletons(n);
  EventLog log;
  log.n = n;
  double time = 0.0;
  while (state.size() > 1) {
    const int b = static_cast<int>(state.size());
    if (options.timed) {
      std::exponential_distribution<double> wait(table.total(b));
      time += wait(rng);
    } else {
      time += 1.0;
    }
    MergeStep step = sample_merge(b, table, rng);
    std::sort(step.chosen.begin(), step.chosen.end(), std::greater<>());
    Block merged;
    int singletons = 0;
    for (std::size_t pos : step.chosen) {
      Block& block = state.blocks[pos];
      if (block.size() == 1) ++singletons;
      merged.insert(merged.end(), block.begin(), block.end());
      std::swap(block, state.blocks.back());
      state.blocks.pop_back();
    }
    std::sort(merged.begin(), merged.end());
    state.blocks.push_back(std::move(merged));
    log.events.push_back({time, step.k, singletons, std::nullopt});
    if (options.observer) options.observer(state);
  }
  return log;
}

}  // namespace coalforge::lambda
