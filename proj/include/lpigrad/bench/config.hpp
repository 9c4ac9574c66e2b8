#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpigrad/grid.hpp"
#include "lpigrad/problems.hpp"

namespace lpigrad::bench {

struct ProblemSpec {
  std::string type = "linear_regression";
  Eigen::Index n = 1000;
  double margin = 0.01;
  double noise_std = 0.05;
  /// Defaults to the experiment seed.
  std::optional<std::uint64_t> seed;
  LabelRule label_rule = LabelRule::noiseless_model;
};

struct InterpolationSpec {
  double bandwidth = 0.01;
  int order = 1;
  Kernel kernel = Kernel::rectangular;
  GridConvention convention = GridConvention::upper;
  double ridge = 0.0;
};

inline const std::vector<std::string> kMethodNames = {"gd", "sgd", "lpi_gd", "catalyst_lpi", "fgm_lpi"};

struct MethodSpec {
  std::string name;
  std::string label;  // output name; defaults to `name`
  double step = 1.0;
  Eigen::Index batch = 500;
  double beta = 0.99;
  double momentum = 0.2;
  std::string mode;  // catalyst_lpi: fixed_beta | theoretical; fgm_lpi: fixed_momentum | theoretical
  int inner_budget = 1;
  int grid_cardinality = 500;
  double init = 0.4;
  std::optional<int> iterations;
  double epsilon_target = 1e-3;
  bool auto_grid = false;
  double grid_constant = 1.0;
  std::vector<int> search_cardinalities;
  std::vector<double> search_inits;

  bool uses_grid() const { return name == "lpi_gd" || name == "catalyst_lpi" || name == "fgm_lpi"; }
};

struct ExperimentConfig {
  ProblemSpec problem;
  InterpolationSpec interpolation;
  std::vector<MethodSpec> methods;
  int iterations = 200;
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  /// Relative gap (F - F*) / (F0 - F*) that counts as "converged" in the summary.
  double threshold = 1e-3;
};

/// Throws ConfigError naming the offending key (and line, for syntax errors).
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
ExperimentConfig parse_config_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& config);

/// The linear-regression reference study: n=1000, margin 0.01, noise 0.05,
/// step 1.0, batch 500, beta 0.99, momentum 0.2, w0 = 0.4, 200 iterations;
/// lpi_gd searched over 5 grid cardinalities x 6 initializations.
nlohmann::json reference_config_json();

}  // namespace lpigrad::bench
