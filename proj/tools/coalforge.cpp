// coalforge: simulation and verification front end.

#include "coalforge/crtsim.hpp"
#include "coalforge/experiments.hpp"
#include "coalforge/lambdasim.hpp"
#include "coalforge/parallel.hpp"
#include "coalforge/prunesim.hpp"
#include "coalforge/specfun.hpp"
#include "coalforge/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

namespace {

using namespace coalforge;
using nlohmann::json;
using specfun::Complex;

constexpr std::size_t kChunk = 4096;

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw std::runtime_error("cannot open '" + path + "' for writing");
      stream = file.get();
    }
  }
  std::ostream& operator*() { return *stream; }
};

void write_histogram(const std::string& path, const std::vector<double>& values, bool integer, int bins) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.precision(10);
  stats::write_csv(os, integer ? stats::integer_histogram(values) : stats::histogram(values, bins));
}

std::uint64_t parse_seed(const std::string& s) { return std::stoull(s, nullptr, 0); }

// Per-replicate statistic selected for a histogram.
double log_statistic(const EventLog& log, const std::string& which) {
  if (which == "collisions") return collision_count(log);
  const auto last = last_event_stats(log);
  if (which == "B") return last.blocks;
  if (which == "E") return last.singletons;
  if (which == "B-E") return last.blocks - last.singletons;
  if (which == "time") return log.events.back().time;
  throw CLI::ValidationError("--histogram-of", "expected collisions, B, E, B-E or time");
}

struct SimOptions {
  int n = 10;
  long long replicates = 1;
  std::string seed = "42";
  bool timed = false;
  std::string out;
  std::string histogram;
  std::string histogram_of = "collisions";
  int bins = 50;
};

void add_sim_options(CLI::App* cmd, SimOptions& o) {
  cmd->add_option("--n", o.n, "number of sampled leaves")->check(CLI::Range(2, 100000000));
  cmd->add_option("--replicates", o.replicates, "independent runs")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master seed; replicate i uses stream i");
  cmd->add_option("--out", o.out, "JSON-lines output (default stdout)");
  cmd->add_option("--histogram", o.histogram, "CSV histogram of a per-run statistic");
  cmd->add_option("--bins", o.bins, "bins for real-valued histograms")->check(CLI::PositiveNumber);
}

template <class Simulate>
void run_logs(const SimOptions& o, unsigned workers, Simulate simulate) {
  Output out(o.out);
  const std::uint64_t master = parse_seed(o.seed);
  std::vector<double> values;
  for (std::size_t begin = 0; begin < static_cast<std::size_t>(o.replicates); begin += kChunk) {
    const std::size_t end = std::min<std::size_t>(begin + kChunk, o.replicates);
    const auto logs = run_replicate_range(master, begin, end, workers, [&](Rng& rng, std::size_t i) {
      EventLog log = simulate(rng);
      log.seed = derive_stream_seed(master, i);
      return log;
    });
    for (const auto& log : logs) {
      *out << to_json(log).dump() << '\n';
      if (!o.histogram.empty()) values.push_back(log_statistic(log, o.histogram_of));
    }
  }
  if (!o.histogram.empty()) write_histogram(o.histogram, values, o.histogram_of != "time", o.bins);
}

json rates_json(const specfun::LambdaMeasure& measure, int n_max) {
  const auto table = lambda::build_table(measure, n_max);
  json rows = json::array();
  for (int b = 2; b <= n_max; ++b) {
    json rates = json::array();
    json probs = json::array();
    for (int k = 2; k <= b; ++k) {
      rates.push_back(table.rate(b, k));
      probs.push_back(table.merger_probability(b, k));
    }
    rows.push_back({{"b", b}, {"total", table.total(b)}, {"rate", rates}, {"merger_probability", probs}});
  }
  return {{"measure", measure.to_string()}, {"n_max", n_max}, {"rows", rows}};
}

specfun::Pgf marginal(const std::string& which) {
  const Complex one{1.0};
  if (which == "E") return [one](Complex z) { return specfun::gf_phi(one, z); };
  if (which == "B-E") return [one](Complex z) { return specfun::gf_phi(z, one); };
  if (which == "B") return [](Complex z) { return specfun::gf_phi(z, z); };
  if (which == "W") return [one](Complex z) { return specfun::gf_psi(one, one, z); };
  if (which == "U-V") return [one](Complex z) { return specfun::gf_psi(z, one, one); };
  if (which == "V-W") return [one](Complex z) { return specfun::gf_psi(one, z, one); };
  throw CLI::ValidationError("--marginal", "expected E, B-E, B, W, U-V or V-W");
}

std::vector<int> parse_suite(const std::string& suite) {
  std::vector<int> out;
  if (suite == "all") {
    for (int i = 1; i <= 13; ++i) out.push_back(i);
    return out;
  }
  std::stringstream ss(suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int value = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || end != item.data() + item.size() || value < 1 || value > 13)
      throw std::invalid_argument("--suite expects 'all' or criterion numbers 1-13, got '" + item + "'");
    out.push_back(value);
  }
  return out;
}

void print_verdict(const StatReport& r, double budget) {
  std::cout << "criterion " << r.criterion << " [" << r.experiment << "]: " << (r.pass ? "PASS" : "FAIL");
  std::cout.precision(4);
  std::cout << "  (" << r.runtime_seconds << " s, budget " << budget << " s)";
  if (r.cause) std::cout << "  cause: " << *r.cause;
  std::cout << '\n';
  for (const auto& c : r.checks) {
    if (!c.holds()) {
      std::cout << "    failed: " << c.name << " = " << c.value << " " << to_string(c.comparator) << " "
                << c.threshold << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coalforge: tree pruning and Lambda-coalescent simulation"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all cores); results do not depend on it");

  // rates
  auto* rates = app.add_subcommand("rates", "merger rate table");
  int rates_n = 12;
  std::string rates_measure = "beta:1.5,0.5";
  std::string rates_out;
  rates->add_option("--n", rates_n, "largest block count")->check(CLI::Range(2, 10000));
  rates->add_option("--measure", rates_measure, "kingman, uniform or beta:A,B");
  rates->add_option("--out", rates_out, "JSON output (default stdout)");

  // simulate-prune
  auto* prune_cmd = app.add_subcommand("simulate-prune", "coalescent from pruning a uniform binary tree");
  SimOptions prune_opts;
  bool record_trees = false;
  add_sim_options(prune_cmd, prune_opts);
  prune_cmd->add_option("--timed", prune_opts.timed, "exponential waiting times (true/false)");
  prune_cmd->add_flag("--record-trees", record_trees, "store the tree code after every event");
  prune_cmd->add_option("--histogram-of", prune_opts.histogram_of, "collisions, B, E, B-E or time");

  // simulate-lambda
  auto* lambda_cmd = app.add_subcommand("simulate-lambda", "Lambda-coalescent jump chain from its rates");
  SimOptions lambda_opts;
  std::string lambda_measure = "beta:1.5,0.5";
  add_sim_options(lambda_cmd, lambda_opts);
  lambda_cmd->add_option("--measure", lambda_measure, "kingman, uniform or beta:A,B");
  lambda_cmd->add_option("--timed", lambda_opts.timed, "exponential waiting times (true/false)");
  lambda_cmd->add_option("--histogram-of", lambda_opts.histogram_of, "collisions, B, E, B-E or time");

  // simulate-crt
  auto* crt_cmd = app.add_subcommand("simulate-crt", "marks on reduced CRT trees: U, V, W, L, H");
  SimOptions crt_opts;
  double alpha = 2.0;
  std::string crt_stat = "U";
  add_sim_options(crt_cmd, crt_opts);
  crt_cmd->add_option("--alpha", alpha, "branching coefficient; marks arrive at rate 2 alpha per length")
      ->check(CLI::PositiveNumber);
  crt_cmd->add_option("--histogram-of", crt_stat, "U, V, W, L or H");

  // gf
  auto* gf = app.add_subcommand("gf", "generating functions of the last coalescent event");
  std::string which = "phi";
  std::string gf_marginal;
  int extract = 0;
  double radius = 0.5;
  double tolerance = 1e-8;
  std::vector<double> at;
  gf->add_option("--which", which, "phi or psi")->check(CLI::IsMember({"phi", "psi"}));
  gf->add_option("--marginal", gf_marginal, "E, B-E or B for phi; W, U-V or V-W for psi");
  gf->add_option("--extract", extract, "extract p_0..p_K")->check(CLI::Range(0, 512));
  gf->add_option("--radius", radius, "contour radius in (0,1)");
  gf->add_option("--tolerance", tolerance, "largest accepted extraction error");
  gf->add_option("--at", at, "evaluate at rho,rho_* (phi) or rho,rho0,rho1 (psi)")->delimiter(',');

  // verify
  auto* verify = app.add_subcommand("verify", "run acceptance presets");
  std::string suite = "all";
  std::string verify_out;
  std::string verify_seed = std::to_string(kDefaultSeed);
  bool with_runtime = false;
  verify->add_option("--suite", suite, "all or a comma list of criterion numbers");
  verify->add_option("--out", verify_out, "JSON array of reports");
  verify->add_option("--seed", verify_seed, "master seed for the presets");
  verify->add_flag("--runtime", with_runtime, "include runtimes (reports are then not byte-reproducible)");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run one experiment and print its report");
  std::string exp_name;
  ExperimentConfig exp_config;
  std::string exp_seed = std::to_string(kDefaultSeed);
  std::map<std::string, double> overrides;
  std::string exp_out;
  exp_cmd->add_option("name", exp_name, "experiment name")->required();
  exp_cmd->add_option("--n", exp_config.n, "problem size");
  exp_cmd->add_option("--replicates", exp_config.replicates, "replicates");
  exp_cmd->add_option("--seed", exp_seed, "master seed");
  exp_cmd->add_option("--set", overrides, "threshold override key=value")->delimiter(',');
  exp_cmd->add_option("--out", exp_out, "JSON output (default stdout)");
  exp_cmd->add_flag("--runtime", with_runtime, "include runtime");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rates) {
      Output out(rates_out);
      *out << rates_json(specfun::LambdaMeasure::parse(rates_measure), rates_n).dump(2) << '\n';
    } else if (*prune_cmd) {
      prune::ChainOptions options;
      options.timed = prune_opts.timed;
      options.record_trees = record_trees;
      run_logs(prune_opts, threads, [&](Rng& rng) { return prune::run_chain(prune_opts.n, rng, options); });
    } else if (*lambda_cmd) {
      const auto table = lambda::build_table(specfun::LambdaMeasure::parse(lambda_measure), lambda_opts.n);
      lambda::LambdaChainOptions options;
      options.timed = lambda_opts.timed;
      run_logs(lambda_opts, threads,
               [&](Rng& rng) { return lambda::run_lambda_chain(lambda_opts.n, table, rng, options); });
    } else if (*crt_cmd) {
      Output out(crt_opts.out);
      const std::uint64_t master = parse_seed(crt_opts.seed);
      const crt::CrtParams params{alpha};
      std::vector<double> values;
      for (std::size_t begin = 0; begin < static_cast<std::size_t>(crt_opts.replicates); begin += kChunk) {
        const std::size_t end = std::min<std::size_t>(begin + kChunk, crt_opts.replicates);
        const auto lines = run_replicate_range(master, begin, end, threads, [&](Rng& rng, std::size_t i) {
          const auto t = crt::sample_reduced_tree(crt_opts.n, rng);
          const auto run = crt::run_crt_pruning(t, params, rng);
          return crt::summary_json(t, run, derive_stream_seed(master, i), params);
        });
        for (const auto& line : lines) {
          *out << line.dump() << '\n';
          if (!crt_opts.histogram.empty()) {
            if (!line.contains(crt_stat)) throw CLI::ValidationError("--histogram-of", "expected U, V, W, L or H");
            values.push_back(line.at(crt_stat).get<double>());
          }
        }
      }
      const bool integer = crt_stat == "U" || crt_stat == "V" || crt_stat == "W";
      write_histogram(crt_opts.histogram, values, integer, crt_opts.bins);
    } else if (*gf) {
      json result{{"which", which}};
      if (!at.empty()) {
        if (which == "phi" && at.size() == 2) {
          result["value"] = specfun::gf_phi(at[0], at[1]);
        } else if (which == "psi" && at.size() == 3) {
          result["value"] = specfun::gf_psi(at[0], at[1], at[2]);
        } else {
          throw CLI::ValidationError("--at", "phi takes 2 arguments, psi takes 3");
        }
        result["at"] = at;
      }
      if (extract > 0) {
        std::vector<std::string> marginals;
        if (!gf_marginal.empty()) {
          marginals.push_back(gf_marginal);
        } else if (which == "phi") {
          marginals = {"E", "B-E", "B"};
        } else {
          marginals = {"W", "U-V", "V-W"};
        }
        for (const auto& m : marginals) {
          const auto coeffs = specfun::pgf_extract(marginal(m), extract, radius, tolerance);
          result["coefficients"][m] = {{"p", coeffs.p},
                                       {"max_error", coeffs.max_error},
                                       {"radius", coeffs.radius},
                                       {"check_radius", coeffs.check_radius},
                                       {"points", coeffs.points}};
        }
      }
      std::cout << result.dump(2) << '\n';
    } else if (*verify) {
      const auto wanted = parse_suite(suite);
      json reports = json::array();
      bool all = true;
      for (auto preset : acceptance_presets(parse_seed(verify_seed))) {
        if (std::find(wanted.begin(), wanted.end(), preset.criterion) == wanted.end()) continue;
        preset.config.workers = threads;
        const auto report = run_experiment(preset.config);
        print_verdict(report, preset.budget_seconds);
        all = all && report.pass;
        reports.push_back(report.to_json(with_runtime));
      }
      if (!verify_out.empty()) {
        Output out(verify_out);
        *out << reports.dump(2) << '\n';
      }
      return all ? 0 : 1;
    } else if (*exp_cmd) {
      exp_config.experiment = experiment_from_string(exp_name);
      exp_config.seed = parse_seed(exp_seed);
      exp_config.tolerances = overrides;
      exp_config.workers = threads;
      const auto report = run_experiment(exp_config);
      Output out(exp_out);
      *out << report.to_json(with_runtime).dump(2) << '\n';
      return report.pass ? 0 : 1;
    }
  } catch (const specfun::PrecisionError& e) {
    std::cerr << "coalforge: precision failure: " << e.what() << '\n';
    return 3;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "coalforge: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
