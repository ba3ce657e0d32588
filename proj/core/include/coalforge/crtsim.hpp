#pragma once

// Reduced trees of the Brownian CRT, their Poisson mark process, and the
// dust mass. Everything is computed on the reduced tree spanned by the root
// and the sampled leaves.

#include "coalforge/coalescent.hpp"
#include "coalforge/rng.hpp"
#include "coalforge/treecore.hpp"

#include <json.hpp>

#include <vector>

namespace coalforge::crt {

struct CrtParams {
  double alpha = 2.0;
  double mark_rate_per_length() const { return 2.0 * alpha; }
};

/// Edge e is the edge above vertex e; lengths are indexed by vertex id.
struct ReducedTree {
  tree::LabelledBinaryTree shape;
  std::vector<double> lengths;
  double total_length = 0.0;     // s_n
  double internal_length = 0.0;  // edges above internal vertices, root edge included

  int leaves() const { return static_cast<int>(shape.leaf_count()); }
  std::size_t edge_count() const { return lengths.size(); }
  tree::NodeId root_edge() const { return shape.root(); }
  void validate() const;
};

/// Uniform shape; s_n^2 ~ Gamma(n, rate 2); lengths s_n times a uniform point
/// of the simplex.
ReducedTree sample_reduced_tree(int n, Rng& rng);

/// 2 alpha times the internal length.
double h_statistic(const ReducedTree& t, const CrtParams& params = {});

/// 2^{-3/2} Gamma(n - 1/2) / Gamma(n).
double expected_first_length(int n);

/// Total mass of 2^{n+1} (2n-1)!/(n-1)! s e^{-2 s^2} over the length orthant,
/// by radial quadrature. The closed form is 2n - 1.
double length_density_mass(int n);

struct MarkEvent {
  double theta = 0.0;
  tree::NodeId edge;
  double position = 0.0;  // distance from the lower end of the edge
};

struct CrtRun {
  std::vector<MarkEvent> marks;  // first mark on each edge before L, then the root mark
  std::vector<double> first_mark;  // per edge; +inf if unmarked before L, L on the root
  int U = 0;
  int V = 0;
  int W = 0;
  double L = 0.0;
  int x_prune = 0;        // effective marks, root included
  int x_coalescent = 0;   // effective marks that merge blocks
  tree::NodeId first_marked_edge;
};

CrtRun run_crt_pruning(const ReducedTree& t, const CrtParams& params, Rng& rng);

/// Blocks of the sampled leaves under ~_theta, for theta <= L.
Partition partition_at(const ReducedTree& t, const CrtRun& run, double theta);

nlohmann::json summary_json(const ReducedTree& t, const CrtRun& run, std::uint64_t seed,
                            const CrtParams& params = {});

/// 1 / (1 + 4 tau) with tau = theta^2 / N^2.
double sample_dust(double theta, Rng& rng);
/// P(sigma_theta <= x) = 2 Phi(2 theta sqrt(x / (1 - x))) - 1.
double dust_cdf(double theta, double x);

/// sigma at theta = 0, h, 2h, ..., theta_max along one path of tau.
std::vector<double> sample_dust_path(Rng& rng, double grid_step, double theta_max);

struct ThetaSample {
  double riemann_sum = 0.0;   // trapezoid rule on [0, theta_max]
  double tail_estimate = 0.0;  // E[integral beyond theta_max | tau(theta_max)]
  double value() const { return riemann_sum + tail_estimate; }
};

ThetaSample estimate_theta_integral(Rng& rng, double grid_step = 0.01, double theta_max = 20.0);

}  // namespace coalforge::crt
