#include "lpigrad/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "lpigrad/errors.hpp"
#include "lpigrad/optimizers.hpp"
#include "lpigrad/weight_cache.hpp"

namespace lpigrad::bench {

namespace {

int resolution_for(int cardinality, int dim) {
  const int m = static_cast<int>(std::lround(std::pow(static_cast<double>(cardinality), 1.0 / dim)));
  long long total = 1;
  for (int i = 0; i < dim; ++i) total *= m;
  if (m < 1 || total != cardinality)
    throw ConfigError("grid_cardinality " + std::to_string(cardinality) + " is not a perfect " +
                      std::to_string(dim) + "-th power");
  return m;
}

InterpolationConfig interpolation_for(const ExperimentConfig& config, int dim, int cardinality) {
  InterpolationConfig ic;
  ic.dim = dim;
  ic.resolution = resolution_for(cardinality, dim);
  ic.bandwidth = config.interpolation.bandwidth;
  ic.order = config.interpolation.order;
  ic.kernel = config.interpolation.kernel;
  ic.ridge = config.interpolation.ridge;
  ic.convention = config.interpolation.convention;
  return ic;
}

std::string format_init(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

using OperatorPtr = std::shared_ptr<const LpiGradientOperator>;

struct SharedOperator {
  OperatorPtr op;
  std::string error;  // set when the weights could not be built
};

Trace run_cell(const ExperimentConfig& config, const MethodSpec& m, const Cell& cell,
               const LinearRegressionProblem& problem, const LpiGradientOperator* op,
               OracleCallCounter& counter) {
  const int iterations = m.iterations.value_or(config.iterations);
  const Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(problem.param_dim(), cell.init);

  if (m.name == "gd") return gd_run(problem, theta0, GdOptions{iterations, m.step}, counter);
  if (m.name == "sgd") {
    SgdOptions o;
    o.iterations = iterations;
    o.step = m.step;
    o.batch = m.batch;
    o.seed = config.seed;
    return sgd_run(problem, theta0, o, counter);
  }

  const InterpolatedGradient estimator(*op, problem);
  if (m.name == "lpi_gd") {
    LpiGdOptions o;
    o.iterations = iterations;
    o.step = m.step;
    return lpi_gd_run(problem, theta0, estimator, o, counter);
  }
  if (m.name == "catalyst_lpi") {
    CatalystOptions o;
    o.mode = m.mode == "theoretical" ? CatalystMode::theoretical : CatalystMode::fixed_beta;
    o.outer_iterations = iterations;
    o.step = m.step;
    o.beta = m.beta;
    o.inner_budget = m.inner_budget;
    return catalyst_run(problem, theta0, estimator, o, counter);
  }
  FgmOptions o;
  o.mode = m.mode == "theoretical" ? FgmMode::theoretical : FgmMode::fixed_momentum;
  o.step = m.step;
  o.momentum = m.momentum;
  o.epsilon_target = m.epsilon_target;
  if (o.mode == FgmMode::fixed_momentum || m.iterations) o.iterations = iterations;
  return fgm_run(problem, theta0, estimator, o, counter);
}

std::map<int, SharedOperator> build_operators(const ExperimentConfig& config, const Dataset& ds,
                                              const std::vector<Cell>& cells,
                                              const std::optional<std::filesystem::path>& cache_dir) {
  std::map<int, SharedOperator> ops;
  for (const auto& c : cells) {
    if (c.grid_cardinality == 0 || ops.count(c.grid_cardinality)) continue;
    SharedOperator& slot = ops[c.grid_cardinality];
    try {
      const auto ic = interpolation_for(config, ds.dim(), c.grid_cardinality);
      slot.op = std::make_shared<const LpiGradientOperator>(load_or_build_operator(ds, ic, cache_dir));
    } catch (const std::exception& e) {
      slot.error = "error:" + error_kind(e) + ": " + e.what();
    }
  }
  return ops;
}

}  // namespace

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const SingularMoment*>(&e)) return "SingularMoment";
  if (dynamic_cast<const MissingValue*>(&e)) return "MissingValue";
  if (dynamic_cast<const DomainViolation*>(&e)) return "DomainViolation";
  if (dynamic_cast<const NonFinite*>(&e)) return "NonFinite";
  if (dynamic_cast<const InnerStall*>(&e)) return "InnerStall";
  if (dynamic_cast<const DegenerateCurvature*>(&e)) return "DegenerateCurvature";
  if (dynamic_cast<const Overflow*>(&e)) return "Overflow";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  return "Exception";
}

std::size_t ExperimentResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return !c.row.ok(); }));
}

std::vector<SummaryRow> ExperimentResult::summary() const {
  std::vector<SummaryRow> rows;
  rows.reserve(cells.size());
  for (const auto& c : cells) rows.push_back(c.row);
  return rows;
}

LinearRegressionProblem make_problem(const ExperimentConfig& config) {
  const auto& p = config.problem;
  return generate_linear_regression(p.n, p.margin, p.noise_std, p.seed.value_or(config.seed),
                                    p.label_rule);
}

std::vector<Cell> expand_cells(const ExperimentConfig& config, const ErmProblem& problem, RunMode mode) {
  const int dim = problem.data_dim();
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    const auto& m = config.methods[k];
    std::vector<int> cards{m.uses_grid() ? m.grid_cardinality : 0};
    std::vector<double> inits{m.init};
    if (mode == RunMode::search) {
      if (!m.search_cardinalities.empty()) cards = m.search_cardinalities;
      if (!m.search_inits.empty()) inits = m.search_inits;
    }
    if (m.name == "fgm_lpi" && m.mode == "theoretical" && m.auto_grid) {
      const int res = fgm_theoretical_resolution(problem.smoothness(),
                                                 static_cast<int>(problem.param_dim()), dim,
                                                 m.epsilon_target, m.grid_constant);
      int card = 1;
      for (int i = 0; i < dim; ++i) card *= res;
      cards = {card};
    }
    for (int card : cards) {
      if (card > 0) interpolation_for(config, dim, card).validate();
      for (double init : inits) cells.push_back(Cell{k, m.label, card, init});
    }
  }
  return cells;
}

std::string trace_file_name(const Cell& cell) {
  std::string name = cell.method;
  if (cell.grid_cardinality > 0) name += "_m" + std::to_string(cell.grid_cardinality);
  return name + "_w" + format_init(cell.init) + ".csv";
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const LinearRegressionProblem problem = make_problem(config);
  const auto cells = expand_cells(config, problem, options.mode);
  const auto ops = build_operators(config, problem.dataset(), cells, options.cache_dir);

  ExperimentResult result;
  result.f_star = problem.optimum()->objective;
  result.cells.resize(cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      const MethodSpec& m = config.methods[cell.method_index];
      CellResult& out = result.cells[i];
      out.cell = cell;
      out.row.method = cell.method;
      out.row.grid_cardinality = cell.grid_cardinality;
      out.row.init = cell.init;

      OracleCallCounter counter;
      try {
        const LpiGradientOperator* op = nullptr;
        if (cell.grid_cardinality > 0) {
          const auto& shared = ops.at(cell.grid_cardinality);
          if (!shared.op) {
            out.row.status = shared.error;
            out.row.final_objective = std::nan("");
            continue;
          }
          op = shared.op.get();
        }
        Trace trace = run_cell(config, m, cell, problem, op, counter);
        trace.config["label"] = cell.method;
        trace.config["grid_cardinality"] = cell.grid_cardinality;
        trace.config["init"] = cell.init;
        trace.seed = config.seed;
        out.row.final_objective = trace.back().objective;
        out.row.iterations_to_threshold = trace.iterations_to_threshold(result.f_star, config.threshold);
        out.row.total_oracle_calls = counter.calls();
        out.row.wallclock_s = trace.back().wallclock_s;
        out.trace = std::move(trace);
      } catch (const std::exception& e) {
        out.row.status = "error:" + error_kind(e) + ": " + e.what();
        out.row.final_objective = std::nan("");
        out.row.total_oracle_calls = counter.calls();
      }
    }
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (options.write_outputs) {
    const std::filesystem::path dir = config.output_dir;
    std::filesystem::create_directories(dir / "traces");
    for (const auto& c : result.cells)
      if (c.trace) write_trace_csv(*c.trace, dir / "traces" / trace_file_name(c.cell));
    emit_summary(result.summary(), dir / "summary.csv");
    std::ofstream cfg(dir / "config.json");
    cfg << to_json(config).dump(2) << '\n';
    if (!cfg) throw IoError("cannot write " + (dir / "config.json").string());
  }
  return result;
}

void emit_summary(std::vector<SummaryRow> rows, const std::filesystem::path& path) {
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.method, a.grid_cardinality, a.init) < std::tie(b.method, b.grid_cardinality, b.init);
  });
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "method,grid_cardinality,init,final_objective,iterations_to_threshold,total_oracle_calls,status,"
         "wallclock_s\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.method << ',' << r.grid_cardinality << ',' << format_double(r.init) << ','
        << format_double(r.final_objective) << ',' << r.iterations_to_threshold << ','
        << r.total_oracle_calls << ',' << status << ',' << format_double(r.wallclock_s) << '\n';
  }
  if (!out) throw IoError("error writing " + path.string());
}

std::vector<SummaryRow> read_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<SummaryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 8) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 8 fields");
    try {
      SummaryRow r;
      r.method = f[0];
      r.grid_cardinality = std::stoi(f[1]);
      r.init = std::stod(f[2]);
      r.final_objective = std::stod(f[3]);
      r.iterations_to_threshold = std::stoll(f[4]);
      r.total_oracle_calls = std::stoull(f[5]);
      r.status = f[6];
      r.wallclock_s = std::stod(f[7]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

std::vector<std::filesystem::path> build_weight_cache(const ExperimentConfig& config, RunMode mode,
                                                      const std::filesystem::path& cache_dir) {
  const LinearRegressionProblem problem = make_problem(config);
  const auto& ds = problem.dataset();
  std::vector<int> cards;
  for (const auto& c : expand_cells(config, problem, mode))
    if (c.grid_cardinality > 0 && std::find(cards.begin(), cards.end(), c.grid_cardinality) == cards.end())
      cards.push_back(c.grid_cardinality);

  std::filesystem::create_directories(cache_dir);
  std::vector<std::filesystem::path> written;
  for (int card : cards) {
    const auto ic = interpolation_for(config, ds.dim(), card);
    const auto key = WeightCacheKey::of(ds, ic);
    const auto path = cache_dir / weight_cache_file_name(key);
    if (!load_weight_cache(path, key)) {
      const LpiGradientOperator op(ds, ic);
      save_weight_cache(path, key, op.weights());
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace lpigrad::bench
