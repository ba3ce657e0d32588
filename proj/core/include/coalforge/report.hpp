#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coalforge {

struct Estimate {
  std::string name;
  double value = 0.0;
  std::optional<double> stderr_;
};

enum class Comparator { less, less_equal, greater, greater_equal };

struct Check {
  std::string name;
  double value = 0.0;
  Comparator comparator = Comparator::less;
  double threshold = 0.0;

  bool holds() const;
};

struct StatReport {
  static constexpr const char* kSchema = "coalforge.statreport/1";

  std::string experiment;
  int criterion = 0;  // acceptance criterion, 0 when run ad hoc
  int n = 0;
  long long replicates = 0;
  std::uint64_t seed = 0;
  std::vector<Estimate> estimates;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool pass = false;
  std::optional<std::string> cause;  // set when the run aborted
  double runtime_seconds = 0.0;
  std::string version;

  void estimate(std::string name, double value, std::optional<double> se = std::nullopt) {
    estimates.push_back({std::move(name), value, se});
  }
  void check(std::string name, double value, Comparator cmp, double threshold) {
    checks.push_back({std::move(name), value, cmp, threshold});
  }
  /// pass = no cause, at least one check, and every check holds.
  void recompute_pass();

  /// Runtime is left out unless asked for, so reports are byte-reproducible.
  nlohmann::json to_json(bool include_runtime = false) const;
  static StatReport from_json(const nlohmann::json& j);
};

std::string to_string(Comparator c);
Comparator comparator_from_string(const std::string& s);

/// Library version string.
std::string version();

}  // namespace coalforge
