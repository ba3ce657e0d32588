// Acceptance suite: one PASS/FAIL line per criterion.

#include "coalforge/experiments.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

using namespace coalforge;

int main(int argc, char** argv) {
  CLI::App app{"coalforge acceptance suite"};
  std::vector<int> criteria;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  bool verbose = false;
  app.add_option("--criterion", criteria, "criteria to run (default: all)")->check(CLI::Range(1, 13));
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads (0: all cores)");
  app.add_flag("--verbose", verbose, "print every check");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (auto preset : acceptance_presets(seed)) {
    if (!criteria.empty() && std::find(criteria.begin(), criteria.end(), preset.criterion) == criteria.end()) continue;
    preset.config.workers = workers;
    const auto report = run_experiment(preset.config);
    const bool in_budget = report.runtime_seconds <= preset.budget_seconds;
    const bool pass = report.pass && in_budget;
    all_pass = all_pass && pass;

    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << preset.criterion << "  "
              << preset.title << "  [" << std::fixed << std::setprecision(1) << report.runtime_seconds << " s / "
              << preset.budget_seconds << " s]\n";
    std::cout << std::defaultfloat << std::setprecision(6);
    if (report.cause) std::cout << "      cause: " << *report.cause << '\n';
    if (!in_budget) std::cout << "      over the runtime budget\n";
    for (const auto& c : report.checks) {
      if (verbose || !c.holds()) {
        std::cout << "      " << (c.holds() ? "ok    " : "failed") << "  " << c.name << " = " << c.value << ' '
                  << to_string(c.comparator) << ' ' << c.threshold << '\n';
      }
    }
    if (verbose || !report.pass) {
      for (const auto& e : report.estimates) {
        std::cout << "      " << e.name << " = " << e.value;
        if (e.stderr_) std::cout << " +- " << *e.stderr_;
        std::cout << '\n';
      }
      for (const auto& n : report.notes) std::cout << "      note: " << n << '\n';
    }
    std::cout.flush();
  }
  return all_pass ? 0 : 1;
}
