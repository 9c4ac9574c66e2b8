#include "lpigrad/oracle.hpp"

#include <cmath>
#include <limits>

#include "lpigrad/errors.hpp"

namespace lpigrad {

Eigen::VectorXd exact_full_gradient(const Dataset& ds, const Eigen::VectorXd& theta,
                                    const SampleGradientOracle& oracle,
                                    OracleCallCounter& counter) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(oracle.param_dim());
  Eigen::VectorXd g(oracle.param_dim());
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    oracle.gradient(ds.point(i), theta, g);
    acc += g;
  }
  counter.add(static_cast<std::uint64_t>(ds.size()));
  return acc / static_cast<double>(ds.size());
}

Eigen::VectorXd minibatch_gradient(const Dataset& ds, const Eigen::VectorXd& theta,
                                   const SampleGradientOracle& oracle, Eigen::Index batch,
                                   std::mt19937_64& rng, OracleCallCounter& counter) {
  if (batch < 1 || batch > ds.size()) throw ConfigError("minibatch: batch size must lie in [1, n]");
  std::uniform_int_distribution<Eigen::Index> pick(0, ds.size() - 1);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(oracle.param_dim());
  Eigen::VectorXd g(oracle.param_dim());
  for (Eigen::Index b = 0; b < batch; ++b) {
    oracle.gradient(ds.point(pick(rng)), theta, g);
    acc += g;
  }
  counter.add(static_cast<std::uint64_t>(batch));
  return acc / static_cast<double>(batch);
}

Eigen::MatrixXd grid_gradients(const Grid<double>& grid, const Eigen::VectorXd& theta,
                               const SampleGradientOracle& oracle, OracleCallCounter& counter) {
  Eigen::MatrixXd values(grid.size(), oracle.param_dim());
  Eigen::VectorXd g(oracle.param_dim());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    oracle.gradient(grid.point(k), theta, g);
    values.row(k) = g.transpose();
  }
  counter.add(static_cast<std::uint64_t>(grid.size()));
  return values;
}

Eigen::VectorXd lpi_gradient(const Dataset& ds, const Eigen::VectorXd& theta,
                             const SampleGradientOracle& oracle, const Grid<double>& grid,
                             std::span<const WeightSet<double>> weights,
                             OracleCallCounter& counter) {
  if (static_cast<Eigen::Index>(weights.size()) != ds.size())
    throw DomainViolation("lpi_gradient: need one weight set per dataset point");
  for (Eigen::Index j = 0; j < ds.size(); ++j) detail::check_domain(ds.point(j), grid.config());

  const Eigen::MatrixXd values = grid_gradients(grid, theta, oracle, counter);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(oracle.param_dim());
  for (Eigen::Index j = 0; j < ds.size(); ++j) {
    for (Eigen::Index i = 0; i < oracle.param_dim(); ++i)
      acc(i) += interpolate(values.col(i), weights[static_cast<std::size_t>(j)]);
  }
  return acc / static_cast<double>(ds.size());
}

LpiGradientOperator::LpiGradientOperator(const Dataset& ds, const InterpolationConfig& config)
    : LpiGradientOperator(ds, config, batch_weights(ds.points(), Grid<double>(config))) {}

LpiGradientOperator::LpiGradientOperator(const Dataset& ds, const InterpolationConfig& config,
                                         std::vector<WeightSet<double>> weights)
    : grid_(config), weights_(std::move(weights)) {
  if (config.dim != ds.dim()) throw DomainViolation("interpolation dim does not match dataset dim");
  if (static_cast<Eigen::Index>(weights_.size()) != ds.size())
    throw DomainViolation("need one weight set per dataset point");
  aggregate_ = Eigen::VectorXd::Zero(grid_.size());
  for (const auto& ws : weights_) {
    for (std::size_t k = 0; k < ws.indices.size(); ++k)
      aggregate_(ws.indices[k]) += ws.values(static_cast<Eigen::Index>(k));
  }
  aggregate_ /= static_cast<double>(ds.size());
}

Eigen::VectorXd LpiGradientOperator::operator()(const Eigen::VectorXd& theta,
                                                const SampleGradientOracle& oracle,
                                                OracleCallCounter& counter) const {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(oracle.param_dim());
  Eigen::VectorXd g(oracle.param_dim());
  for (Eigen::Index k = 0; k < grid_.size(); ++k) {
    oracle.gradient(grid_.point(k), theta, g);
    acc += aggregate_(k) * g;
  }
  counter.add(static_cast<std::uint64_t>(grid_.size()));
  return acc;
}

double sup_norm_error(const SampleGradientOracle& oracle, const Eigen::VectorXd& theta,
                      const Grid<double>& grid, const Eigen::MatrixXd& probe_points) {
  OracleCallCounter scratch;
  const Eigen::MatrixXd values = grid_gradients(grid, theta, oracle, scratch);
  const auto weights = batch_weights(probe_points, grid);
  double worst = 0.0;
  Eigen::VectorXd g(oracle.param_dim());
  for (Eigen::Index c = 0; c < probe_points.cols(); ++c) {
    oracle.gradient(probe_points.col(c), theta, g);
    for (Eigen::Index i = 0; i < oracle.param_dim(); ++i) {
      const double phi = interpolate(values.col(i), weights[static_cast<std::size_t>(c)]);
      worst = std::max(worst, std::abs(phi - g(i)));
    }
  }
  return worst;
}

Eigen::MatrixXd default_probe_points(const Dataset& ds, double bandwidth, Eigen::Index extra) {
  const int d = ds.dim();
  // Generalized golden-ratio (R_d) sequence: phi_d is the root of x^(d+1) = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  Eigen::VectorXd alpha(d);
  for (int j = 0; j < d; ++j) alpha(j) = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);

  Eigen::MatrixXd out(d, ds.size() + extra);
  out.leftCols(ds.size()) = ds.points();
  const double lo = bandwidth;
  const double width = 1.0 - 2.0 * bandwidth;
  for (Eigen::Index k = 0; k < extra; ++k) {
    for (int j = 0; j < d; ++j) {
      const double u = std::fmod(0.5 + alpha(j) * static_cast<double>(k + 1), 1.0);
      out(j, ds.size() + k) = lo + width * u;
    }
  }
  return out;
}

int grid_size_for_accuracy(double delta, double eta, int dim, double constant,
                           double max_grid_points) {
  if (!(delta > 0.0) || !(eta > 0.0) || !(constant > 0.0))
    throw ConfigError("grid_size_for_accuracy: delta, eta and C must be positive");
  // Relative slack keeps exact powers (e.g. 100^(1/2)) from rounding up.
  const double m = std::ceil(constant * std::pow(1.0 / delta, 1.0 / eta) * (1.0 - 1e-12));
  if (!std::isfinite(m) || std::pow(m, dim) > max_grid_points ||
      m > static_cast<double>(std::numeric_limits<int>::max()))
    throw Overflow("grid_size_for_accuracy: m = " + std::to_string(m) + " exceeds the grid limit");
  return std::max(1, static_cast<int>(m));
}

}  // namespace lpigrad
