#include "coalforge/experiments.hpp"
#include "coalforge/parallel.hpp"

#include <doctest.h>

#include <set>

using namespace coalforge;

TEST_SUITE("harness") {

TEST_CASE("pass is recomputed from checks") {
  StatReport r;
  r.check("a", 0.01, Comparator::less, 0.05);
  r.check("b", 3.0, Comparator::greater_equal, 3.0);
  r.recompute_pass();
  CHECK(r.pass);
  r.check("c", 1.0, Comparator::less_equal, 0.5);
  r.recompute_pass();
  CHECK_FALSE(r.pass);
  StatReport empty;
  empty.recompute_pass();
  CHECK_FALSE(empty.pass);
  StatReport aborted;
  aborted.check("a", 0.0, Comparator::less, 1.0);
  aborted.cause = "precision";
  aborted.recompute_pass();
  CHECK_FALSE(aborted.pass);
}

TEST_CASE("report JSON round trip") {
  StatReport r;
  r.experiment = "rates";
  r.criterion = 1;
  r.seed = 12345678901234567890ULL;
  r.version = version();
  r.estimate("x", 1.5, 0.1);
  r.estimate("y", 2.0);
  r.check("z", 0.2, Comparator::greater, 0.1);
  r.notes.push_back("note");
  r.runtime_seconds = 3.5;
  r.recompute_pass();
  const auto j = r.to_json();
  CHECK_FALSE(j.contains("runtime_seconds"));
  CHECK(r.to_json(true).at("runtime_seconds") == 3.5);
  const auto back = StatReport::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.seed == r.seed);
  CHECK(back.checks.front().holds());
  CHECK_THROWS(StatReport::from_json(nlohmann::json{{"schema", "other"}}));
}

TEST_CASE("experiment names") {
  std::set<std::string> names;
  for (auto e : all_experiments()) {
    names.insert(to_string(e));
    CHECK(experiment_from_string(to_string(e)) == e);
  }
  CHECK(names.size() == all_experiments().size());
  CHECK_THROWS_AS(experiment_from_string("nope"), std::invalid_argument);
}

TEST_CASE("presets cover every criterion once") {
  const auto presets = acceptance_presets();
  REQUIRE(presets.size() == 13);
  for (std::size_t i = 0; i < presets.size(); ++i) {
    CHECK(presets[i].criterion == static_cast<int>(i + 1));
    CHECK(presets[i].config.criterion == presets[i].criterion);
    CHECK(presets[i].budget_seconds > 0);
  }
}

TEST_CASE("invalid configs yield a failed report with a cause") {
  ExperimentConfig c;
  c.experiment = Experiment::tree_counts;
  c.n = 7;
  const auto r = run_experiment(c);
  CHECK_FALSE(r.pass);
  REQUIRE(r.cause.has_value());
  CHECK(r.to_json().contains("cause"));
}

TEST_CASE("precision failures are reported, not thrown") {
  ExperimentConfig c;
  c.experiment = Experiment::stochastic_order;
  c.tolerances["radius"] = 0.3;
  const auto r = run_experiment(c);
  CHECK_FALSE(r.pass);
  REQUIRE(r.cause.has_value());
  CHECK(r.cause->find("pgf_extract") != std::string::npos);
}

TEST_CASE("reports do not depend on the worker count") {
  for (auto e : {Experiment::sampler_uniformity, Experiment::crt_uvw, Experiment::last_event}) {
    ExperimentConfig c;
    c.experiment = e;
    c.n = e == Experiment::sampler_uniformity ? 3 : 30;
    c.replicates = 3000;
    c.tolerances["w_n"] = 40;
    c.workers = 1;
    const auto one = run_experiment(c).to_json().dump();
    c.workers = 3;
    const auto three = run_experiment(c).to_json().dump();
    CHECK(one == three);
  }
}

TEST_CASE("replicate runner") {
  const auto a = run_replicates(7, 100, 1, [](Rng& rng, std::size_t i) { return rng() + i; });
  const auto b = run_replicates(7, 100, 4, [](Rng& rng, std::size_t i) { return rng() + i; });
  CHECK(a == b);
  const auto tail = run_replicate_range(7, 50, 100, 2, [](Rng& rng, std::size_t i) { return rng() + i; });
  CHECK(std::equal(tail.begin(), tail.end(), a.begin() + 50));
  CHECK_THROWS_AS(run_replicates(7, 10, 2,
                                 [](Rng&, std::size_t i) -> int {
                                   if (i == 5) throw std::runtime_error("boom");
                                   return 0;
                                 }),
                  std::runtime_error);
}

TEST_CASE("deterministic experiments pass") {
  for (auto e : {Experiment::rates, Experiment::tree_counts, Experiment::gf_coefficients, Experiment::gf_identities,
                 Experiment::stochastic_order}) {
    ExperimentConfig c;
    c.experiment = e;
    const auto r = run_experiment(c);
    CHECK_MESSAGE(r.pass, to_string(e));
  }
}

}  // TEST_SUITE
