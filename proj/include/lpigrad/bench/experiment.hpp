#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lpigrad/bench/config.hpp"
#include "lpigrad/problems.hpp"
#include "lpigrad/trace.hpp"

namespace lpigrad::bench {

enum class RunMode { run, search };

struct Cell {
  std::size_t method_index = 0;
  std::string method;  // label
  int grid_cardinality = 0;  // 0 for gd / sgd
  double init = 0.0;
};

struct SummaryRow {
  std::string method;
  int grid_cardinality = 0;
  double init = 0.0;
  double final_objective = 0.0;
  long long iterations_to_threshold = -1;
  std::uint64_t total_oracle_calls = 0;
  double wallclock_s = 0.0;
  std::string status = "ok";  // or "error:<Kind>: message"

  bool ok() const { return status == "ok"; }
};

struct CellResult {
  Cell cell;
  SummaryRow row;
  std::optional<Trace> trace;  // empty when the cell failed
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  double f_star = 0.0;

  std::size_t failures() const;
  std::vector<SummaryRow> summary() const;
};

struct RunOptions {
  RunMode mode = RunMode::run;
  int threads = 1;
  /// Directory for weight files; when unset, weights are always recomputed.
  std::optional<std::filesystem::path> cache_dir;
  /// Write traces and summary.csv under config.output_dir.
  bool write_outputs = true;
};

LinearRegressionProblem make_problem(const ExperimentConfig& config);

/// Expands the config into cells. Throws ConfigError on an unusable grid.
std::vector<Cell> expand_cells(const ExperimentConfig& config, const ErmProblem& problem, RunMode mode);

/// Runs every cell. A failing cell is reported in its row; other cells continue.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Rows sorted by (method, grid_cardinality, init); wall-clock is the last column.
void emit_summary(std::vector<SummaryRow> rows, const std::filesystem::path& path);
std::vector<SummaryRow> read_summary(const std::filesystem::path& path);

std::string trace_file_name(const Cell& cell);

/// Computes and stores weight files for every grid the config needs. Returns the written paths.
std::vector<std::filesystem::path> build_weight_cache(const ExperimentConfig& config, RunMode mode,
                                                      const std::filesystem::path& cache_dir);

/// Short class name of a library error, e.g. "SingularMoment".
std::string error_kind(const std::exception& e);

}  // namespace lpigrad::bench
