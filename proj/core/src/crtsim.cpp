#include "coalforge/crtsim.hpp"

#include "coalforge/quadrature.hpp"
#include "coalforge/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace coalforge::crt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double exp_draw(double rate, Rng& rng) { return -std::log(uniform_open(rng)) / rate; }

double nonzero_normal(Rng& rng) {
  std::normal_distribution<double> normal;
  double z = 0.0;
  while (z == 0.0) z = normal(rng);
  return z;
}

}  // namespace

void ReducedTree::validate() const {
  shape.validate();
  const int n = leaves();
  if (edge_count() != static_cast<std::size_t>(2 * n - 1) || shape.arena_size() != edge_count()) {
    throw std::logic_error("ReducedTree: expected 2n-1 edges");
  }
  double sum = 0.0;
  double internal = 0.0;
  for (std::size_t e = 0; e < lengths.size(); ++e) {
    if (!(lengths[e] > 0.0)) throw std::logic_error("ReducedTree: nonpositive edge length");
    sum += lengths[e];
    if (!shape.is_leaf(tree::NodeId{static_cast<std::uint32_t>(e)})) internal += lengths[e];
  }
  const double scale = std::max(1.0, total_length);
  if (std::abs(sum - total_length) > 1e-12 * scale * edge_count() ||
      std::abs(internal - internal_length) > 1e-12 * scale * edge_count()) {
    throw std::logic_error("ReducedTree: length totals out of sync");
  }
}

ReducedTree sample_reduced_tree(int n, Rng& rng) {
  if (n < 1) throw std::domain_error("sample_reduced_tree: need n >= 1");
  ReducedTree t;
  t.shape = tree::sample_uniform(n, rng);
  std::gamma_distribution<double> gamma(n, 0.5);
  t.total_length = std::sqrt(gamma(rng));
  const std::size_t edges = 2 * static_cast<std::size_t>(n) - 1;
  t.lengths.resize(edges);
  double sum = 0.0;
  for (auto& h : t.lengths) {
    h = -std::log(uniform_open(rng));
    sum += h;
  }
  t.internal_length = 0.0;
  for (std::size_t e = 0; e < edges; ++e) {
    t.lengths[e] *= t.total_length / sum;
    if (!t.shape.is_leaf(tree::NodeId{static_cast<std::uint32_t>(e)})) t.internal_length += t.lengths[e];
  }
  double resum = 0.0;
  for (double h : t.lengths) resum += h;
  t.total_length = resum;
  return t;
}

double h_statistic(const ReducedTree& t, const CrtParams& params) {
  return params.mark_rate_per_length() * t.internal_length;
}

double expected_first_length(int n) {
  if (n < 1) throw std::domain_error("expected_first_length: need n >= 1");
  return std::pow(2.0, -1.5) * std::exp(specfun::log_gamma(n - 0.5) - specfun::log_gamma(n));
}

double length_density_mass(int n) {
  if (n < 1) throw std::domain_error("length_density_mass: need n >= 1");
  // Lengths with sum s fill a simplex slice of volume s^{2n-2} / (2n-2)!.
  const double log_const = (n + 1) * std::numbers::ln2 + specfun::log_gamma(2.0 * n) -
                           specfun::log_gamma(n) - specfun::log_gamma(2.0 * n - 1);
  auto radial = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(log_const + (2.0 * n - 1) * std::log(s) - 2.0 * s * s);
  };
  const auto r = quadrature::semi_infinite(radial, {0.0, 1e-12, 4000});
  if (!r.converged) throw specfun::PrecisionError("length_density_mass: quadrature did not converge");
  return r.value;
}

CrtRun run_crt_pruning(const ReducedTree& t, const CrtParams& params, Rng& rng) {
  const int n = t.leaves();
  if (n < 2) throw std::domain_error("run_crt_pruning: need n >= 2");
  if (!(params.alpha > 0.0)) throw std::domain_error("run_crt_pruning: need alpha > 0");
  const double rate = params.mark_rate_per_length();
  const tree::NodeId root = t.root_edge();
  const std::size_t edges = t.edge_count();

  // Later marks on an already marked edge leave the partition unchanged, so
  // only the first mark of each edge is drawn.
  CrtRun run;
  run.L = exp_draw(rate * t.lengths[root.value], rng);
  run.first_mark.assign(edges, kInf);
  run.first_mark[root.value] = run.L;
  for (std::size_t e = 0; e < edges; ++e) {
    if (e == root.value) continue;
    const double time = exp_draw(rate * t.lengths[e], rng);
    if (time < run.L) {
      run.first_mark[e] = time;
      std::uniform_real_distribution<double> along(0.0, t.lengths[e]);
      run.marks.push_back({time, tree::NodeId{static_cast<std::uint32_t>(e)}, along(rng)});
    }
  }
  std::sort(run.marks.begin(), run.marks.end(),
            [](const MarkEvent& a, const MarkEvent& b) { return a.theta < b.theta; });
  run.first_marked_edge = run.marks.empty() ? root : run.marks.front().edge;
  std::uniform_real_distribution<double> along_root(0.0, t.lengths[root.value]);
  run.marks.push_back({run.L, root, along_root(rng)});

  // Preorder pass: topmost marked edge below the root, and the earliest mark
  // strictly above each edge.
  std::vector<tree::NodeId> top(edges, tree::kNoNode);
  std::vector<double> above(edges, kInf);
  std::map<std::uint32_t, int> class_size;
  int unmarked = 0;
  for (tree::NodeId v : t.shape.preorder()) {
    if (v == root) {
      above[v.value] = kInf;
    } else {
      const tree::NodeId p = t.shape.parent(v);
      above[v.value] = std::min(above[p.value], p == root ? kInf : run.first_mark[p.value]);
      top[v.value] = top[p.value].valid() ? top[p.value]
                     : run.first_mark[v.value] < kInf ? v
                                                       : tree::kNoNode;
    }
    const double own = run.first_mark[v.value];
    if (own < kInf && own < above[v.value]) {
      ++run.x_prune;
      if (!t.shape.is_leaf(v)) ++run.x_coalescent;
    }
    if (t.shape.is_leaf(v)) {
      if (top[v.value].valid()) {
        ++class_size[top[v.value].value];
      } else {
        ++unmarked;
      }
    }
  }
  int singles = 0;
  for (const auto& [edge, size] : class_size) singles += size == 1;
  run.U = unmarked + static_cast<int>(class_size.size());
  run.V = unmarked + singles;
  run.W = singles;
  return run;
}

Partition partition_at(const ReducedTree& t, const CrtRun& run, double theta) {
  const tree::NodeId root = t.root_edge();
  std::vector<tree::NodeId> top(t.edge_count(), tree::kNoNode);
  std::map<std::uint32_t, Block> classes;
  Partition out;
  for (tree::NodeId v : t.shape.preorder()) {
    if (v != root) {
      const tree::NodeId p = t.shape.parent(v);
      top[v.value] = top[p.value].valid() ? top[p.value]
                     : run.first_mark[v.value] < theta ? v
                                                        : tree::kNoNode;
    }
    if (t.shape.is_leaf(v)) {
      const auto labels = t.shape.block(v);
      if (top[v.value].valid()) {
        auto& c = classes[top[v.value].value];
        c.insert(c.end(), labels.begin(), labels.end());
      } else {
        out.blocks.emplace_back(labels.begin(), labels.end());
      }
    }
  }
  for (auto& [edge, block] : classes) {
    std::sort(block.begin(), block.end());
    out.blocks.push_back(std::move(block));
  }
  return out.canonical();
}

nlohmann::json summary_json(const ReducedTree& t, const CrtRun& run, std::uint64_t seed,
                            const CrtParams& params) {
  return {{"n", t.leaves()}, {"seed", seed}, {"U", run.U},          {"V", run.V},
          {"W", run.W},      {"L", run.L},   {"H", h_statistic(t, params)}};
}

double sample_dust(double theta, Rng& rng) {
  if (!(theta > 0.0)) throw std::domain_error("sample_dust: need theta > 0");
  const double z = nonzero_normal(rng);
  const double tau = theta * theta / (z * z);
  return 1.0 / (1.0 + 4.0 * tau);
}

double dust_cdf(double theta, double x) {
  if (!(theta > 0.0)) throw std::domain_error("dust_cdf: need theta > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double arg = 2.0 * theta * std::sqrt(x / (1.0 - x));
  return std::erf(arg / std::numbers::sqrt2);  // 2 Phi(arg) - 1
}

std::vector<double> sample_dust_path(Rng& rng, double grid_step, double theta_max) {
  if (!(grid_step > 0.0) || !(theta_max > 0.0)) throw std::domain_error("sample_dust_path: bad grid");
  const auto steps = static_cast<std::size_t>(std::llround(theta_max / grid_step));
  std::vector<double> sigma(steps + 1);
  double tau = 0.0;
  sigma[0] = 1.0;
  const double h2 = grid_step * grid_step;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double z = nonzero_normal(rng);
    tau += h2 / (z * z);
    sigma[i] = 1.0 / (1.0 + 4.0 * tau);
  }
  return sigma;
}

ThetaSample estimate_theta_integral(Rng& rng, double grid_step, double theta_max) {
  if (!(grid_step > 0.0 && grid_step <= 0.01)) throw std::domain_error("estimate_theta_integral: need grid_step <= 0.01");
  if (!(theta_max >= 20.0)) throw std::domain_error("estimate_theta_integral: need theta_max >= 20");
  const auto sigma = sample_dust_path(rng, grid_step, theta_max);
  ThetaSample out;
  double sum = 0.5 * (sigma.front() + sigma.back());
  for (std::size_t i = 1; i + 1 < sigma.size(); ++i) sum += sigma[i];
  out.riemann_sum = sum * grid_step;
  // Beyond theta_max the increment is again theta^2 / N^2; integrating
  // 1/(A + 4 s^2 / N^2) over s and averaging over N gives sqrt(pi/8) / sqrt(A).
  out.tail_estimate = std::sqrt(std::numbers::pi / 8.0) * std::sqrt(sigma.back());
  return out;
}

}  // namespace coalforge::crt
