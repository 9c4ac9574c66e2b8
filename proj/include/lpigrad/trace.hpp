#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

namespace lpigrad {

struct TraceRecord {
  Eigen::Index iteration = 0;
  Eigen::VectorXd theta;
  double objective = 0.0;
  std::uint64_t oracle_calls = 0;
  double wallclock_s = 0.0;
};

/// Per-iteration history of one optimizer run.
struct Trace {
  std::vector<TraceRecord> records;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;

  const TraceRecord& back() const { return records.back(); }
  double best_objective() const;
  /// Best objective among records whose cumulative oracle calls are <= budget.
  double best_objective_within(std::uint64_t budget) const;
  /// First iteration with objective - f_star <= rel * (objective_0 - f_star), or -1.
  Eigen::Index iterations_to_threshold(double f_star, double rel) const;
};

/// Header `iter,objective,oracle_calls,theta_0[,theta_1...],wallclock_s`, 17 significant digits.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);
Trace read_trace_csv(const std::filesystem::path& path);

nlohmann::json trace_to_json(const Trace& trace);
void write_trace_json(const Trace& trace, const std::filesystem::path& path);

/// "%.17g"
std::string format_double(double v);

}  // namespace lpigrad
