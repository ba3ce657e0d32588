#include "coalforge/report.hpp"

#include <stdexcept>

#ifndef COALFORGE_VERSION
#define COALFORGE_VERSION "unknown"
#endif

namespace coalforge {

std::string version() { return COALFORGE_VERSION; }

bool Check::holds() const {
  switch (comparator) {
    case Comparator::less: return value < threshold;
    case Comparator::less_equal: return value <= threshold;
    case Comparator::greater: return value > threshold;
    case Comparator::greater_equal: return value >= threshold;
  }
  return false;
}

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::less: return "<";
    case Comparator::less_equal: return "<=";
    case Comparator::greater: return ">";
    case Comparator::greater_equal: return ">=";
  }
  return "?";
}

Comparator comparator_from_string(const std::string& s) {
  if (s == "<") return Comparator::less;
  if (s == "<=") return Comparator::less_equal;
  if (s == ">") return Comparator::greater;
  if (s == ">=") return Comparator::greater_equal;
  throw std::invalid_argument("unknown comparator '" + s + "'");
}

void StatReport::recompute_pass() {
  pass = !cause.has_value() && !checks.empty();
  for (const auto& c : checks) pass = pass && c.holds();
}

nlohmann::json StatReport::to_json(bool include_runtime) const {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["version"] = version;
  j["experiment"] = experiment;
  j["criterion"] = criterion;
  j["n"] = n;
  j["replicates"] = replicates;
  j["seed"] = seed;
  auto& est = j["estimates"] = nlohmann::json::array();
  for (const auto& e : estimates) {
    nlohmann::json item{{"name", e.name}, {"value", e.value}};
    if (e.stderr_) item["stderr"] = *e.stderr_;
    est.push_back(std::move(item));
  }
  auto& chk = j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    chk.push_back({{"name", c.name},
                   {"value", c.value},
                   {"comparator", to_string(c.comparator)},
                   {"threshold", c.threshold},
                   {"holds", c.holds()}});
  }
  j["notes"] = notes;
  j["pass"] = pass;
  if (cause) j["cause"] = *cause;
  if (include_runtime) j["runtime_seconds"] = runtime_seconds;
  return j;
}

StatReport StatReport::from_json(const nlohmann::json& j) {
  if (j.at("schema").get<std::string>() != kSchema) throw std::invalid_argument("StatReport: unknown schema");
  StatReport r;
  r.version = j.at("version").get<std::string>();
  r.experiment = j.at("experiment").get<std::string>();
  r.criterion = j.at("criterion").get<int>();
  r.n = j.at("n").get<int>();
  r.replicates = j.at("replicates").get<long long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("estimates")) {
    Estimate est{e.at("name").get<std::string>(), e.at("value").get<double>(), std::nullopt};
    if (e.contains("stderr")) est.stderr_ = e.at("stderr").get<double>();
    r.estimates.push_back(std::move(est));
  }
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                        comparator_from_string(c.at("comparator").get<std::string>()),
                        c.at("threshold").get<double>()});
  }
  r.notes = j.at("notes").get<std::vector<std::string>>();
  r.pass = j.at("pass").get<bool>();
  if (j.contains("cause")) r.cause = j.at("cause").get<std::string>();
  if (j.contains("runtime_seconds")) r.runtime_seconds = j.at("runtime_seconds").get<double>();
  return r;
}

}  // namespace coalforge
