#pragma once

#include "coalforge/report.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace coalforge {

enum class Experiment {
  rates,
  tree_counts,
  sampler_uniformity,
  equivalence,
  first_merger,
  rayleigh,
  last_event,
  gf_coefficients,
  gf_identities,
  crt_hn,
  crt_uvw,
  dust,
  theta_integral,
  dust_theta,
  stochastic_order,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);
std::vector<Experiment> all_experiments();

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct ExperimentConfig {
  Experiment experiment = Experiment::rates;
  int n = 0;                 // 0 selects the experiment default
  long long replicates = 0;  // 0 selects the experiment default
  std::uint64_t seed = kDefaultSeed;
  /// Threshold and size overrides by name, e.g. "significance", "ks".
  std::map<std::string, double> tolerances;
  unsigned workers = 0;  // 0: hardware concurrency; never affects results
  int criterion = 0;

  double tolerance(const std::string& key, double fallback) const;
};

/// Throws std::invalid_argument on a config outside the experiment's range.
void validate(const ExperimentConfig& config);

/// Never throws for numerical trouble: a failed run yields pass = false and a cause.
StatReport run_experiment(const ExperimentConfig& config);

struct Preset {
  int criterion = 0;
  std::string title;
  double budget_seconds = 0.0;
  ExperimentConfig config;
};

/// One preset per acceptance criterion, in order.
std::vector<Preset> acceptance_presets(std::uint64_t seed = kDefaultSeed);

}  // namespace coalforge
