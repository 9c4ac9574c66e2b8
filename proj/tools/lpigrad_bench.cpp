// Benchmark driver: runs optimizer comparisons described by a JSON config.
//
//   lpigrad_bench run <config> [--out DIR] [--seed N] [--threads N]
//   lpigrad_bench search <config> ...
//   lpigrad_bench weights-cache <config> [--out DIR]
//   lpigrad_bench check
//   lpigrad_bench --print-defaults
//
// Exit status: 0 success, 1 configuration error, 2 when some cells failed.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "lpigrad/bench/config.hpp"
#include "lpigrad/bench/experiment.hpp"
#include "lpigrad/errors.hpp"
#include "lpigrad/invariants.hpp"
#include "lpigrad/weight_cache.hpp"

namespace {

using namespace lpigrad;
using namespace lpigrad::bench;

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

ExperimentConfig load(const CommonArgs& a) {
  ExperimentConfig c = parse_config(a.config);
  if (!a.out.empty()) c.output_dir = a.out;
  if (a.seed) {
    c.seed = *a.seed;
    c.problem.seed = *a.seed;
  }
  return c;
}

std::filesystem::path cache_dir_for(const ExperimentConfig& c) {
  return weight_cache_dir(std::filesystem::path(c.output_dir) / "weights");
}

int run_cells(const CommonArgs& a, RunMode mode) {
  const ExperimentConfig config = load(a);
  RunOptions opts;
  opts.mode = mode;
  opts.threads = a.threads;
  opts.cache_dir = cache_dir_for(config);
  const ExperimentResult result = run_experiment(config, opts);

  std::printf("%-14s %6s %6s %22s %8s %12s  %s\n", "method", "grid", "init", "final_objective", "iters",
              "oracle_calls", "status");
  for (const auto& r : result.summary()) {
    std::printf("%-14s %6d %6g %22.15g %8lld %12llu  %s\n", r.method.c_str(), r.grid_cardinality, r.init,
                r.final_objective, r.iterations_to_threshold,
                static_cast<unsigned long long>(r.total_oracle_calls), r.status.c_str());
  }
  std::printf("F* = %.17g\nsummary: %s/summary.csv\n", result.f_star, config.output_dir.c_str());
  if (const auto failed = result.failures()) {
    std::fprintf(stderr, "%zu of %zu cells failed\n", failed, result.cells.size());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local polynomial interpolation gradient benchmarks"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the reference configuration and exit");

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool with_run_flags) {
    sub->add_option("config", args.config, "Experiment config (JSON)")->required();
    sub->add_option("--out", args.out, "Output directory (overrides output_dir)");
    if (with_run_flags) {
      sub->add_option("--seed", args.seed, "Seed for data generation and sampling");
      sub->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
    }
  };
  auto* run = app.add_subcommand("run", "Run every method at its configured setting");
  add_common(run, true);
  auto* search = app.add_subcommand("search", "Run each method's grid-cardinality x init search");
  add_common(search, true);
  auto* cache = app.add_subcommand("weights-cache", "Precompute interpolation weights for a config");
  add_common(cache, false);
  auto* check = app.add_subcommand("check", "Run library self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (print_defaults) {
      std::cout << reference_config_json().dump(2) << '\n';
      return 0;
    }
    if (*run) return run_cells(args, RunMode::run);
    if (*search) return run_cells(args, RunMode::search);
    if (*cache) {
      const ExperimentConfig config = load(args);
      for (const auto& p : build_weight_cache(config, RunMode::search, cache_dir_for(config)))
        std::cout << p.string() << '\n';
      return 0;
    }
    if (*check) {
      int failed = 0;
      for (const auto& r : run_invariants()) {
        std::printf("%s %-26s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        failed += r.passed ? 0 : 1;
      }
      return failed ? 2 : 0;
    }
    std::cout << app.help();
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
