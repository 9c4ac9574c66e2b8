#include "lpigrad/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "lpigrad/errors.hpp"

namespace lpigrad {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double Trace::best_objective() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) best = std::min(best, r.objective);
  return best;
}

double Trace::best_objective_within(std::uint64_t budget) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records)
    if (r.oracle_calls <= budget) best = std::min(best, r.objective);
  return best;
}

Eigen::Index Trace::iterations_to_threshold(double f_star, double rel) const {
  if (records.empty()) return -1;
  const double target = rel * (records.front().objective - f_star);
  for (const auto& r : records)
    if (r.objective - f_star <= target) return r.iteration;
  return -1;
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot write trace " + path.string());
  const Eigen::Index p = trace.records.empty() ? 0 : trace.records.front().theta.size();
  std::fputs("iter,objective,oracle_calls", f);
  for (Eigen::Index i = 0; i < p; ++i) std::fprintf(f, ",theta_%ld", static_cast<long>(i));
  std::fputs(",wallclock_s\n", f);
  for (const auto& r : trace.records) {
    std::fprintf(f, "%ld,%s,%llu", static_cast<long>(r.iteration), format_double(r.objective).c_str(),
                 static_cast<unsigned long long>(r.oracle_calls));
    for (Eigen::Index i = 0; i < r.theta.size(); ++i)
      std::fprintf(f, ",%s", format_double(r.theta(i)).c_str());
    std::fprintf(f, ",%s\n", format_double(r.wallclock_s).c_str());
  }
  if (std::fclose(f) != 0) throw IoError("error writing trace " + path.string());
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty trace file");
  Eigen::Index columns = 1;
  for (char c : line) columns += (c == ',');
  const Eigen::Index p = columns - 4;
  if (p < 0) throw IoError(path.string() + ": malformed trace header");

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<Eigen::Index>(cells.size()) != columns)
      throw IoError(path.string() + ": row " + std::to_string(line_no) + " has the wrong column count");
    TraceRecord r;
    r.iteration = std::stol(cells[0]);
    r.objective = std::strtod(cells[1].c_str(), nullptr);
    r.oracle_calls = std::stoull(cells[2]);
    r.theta.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) r.theta(i) = std::strtod(cells[3 + i].c_str(), nullptr);
    r.wallclock_s = std::strtod(cells.back().c_str(), nullptr);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

nlohmann::json trace_to_json(const Trace& trace) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : trace.records) {
    records.push_back({{"iter", r.iteration},
                       {"objective", r.objective},
                       {"oracle_calls", r.oracle_calls},
                       {"theta", std::vector<double>(r.theta.data(), r.theta.data() + r.theta.size())},
                       {"wallclock_s", r.wallclock_s}});
  }
  return {{"config", trace.config}, {"seed", trace.seed}, {"records", std::move(records)}};
}

void write_trace_json(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace " + path.string());
  out << trace_to_json(trace).dump(2) << '\n';
  if (!out) throw IoError("error writing trace " + path.string());
}

}  // namespace lpigrad
