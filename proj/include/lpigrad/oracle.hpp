#pragma once

#include <Eigen/Core>

#include <atomic>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lpigrad/dataset.hpp"
#include "lpigrad/grid.hpp"
#include "lpigrad/weights.hpp"

namespace lpigrad {

/// Per-sample gradient g(y; theta) = grad_theta f(y; theta), evaluable at any
/// point of the data domain [0,1]^d, not only at dataset points.
class SampleGradientOracle {
 public:
  virtual ~SampleGradientOracle() = default;

  virtual Eigen::Index param_dim() const = 0;
  virtual int data_dim() const = 0;

  /// All p partial derivatives at `point`. Must be deterministic.
  virtual void gradient(const Eigen::Ref<const Eigen::VectorXd>& point,
                        const Eigen::Ref<const Eigen::VectorXd>& theta,
                        Eigen::Ref<Eigen::VectorXd> out) const = 0;

  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& point,
                           const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    Eigen::VectorXd out(param_dim());
    gradient(point, theta, out);
    return out;
  }

  /// Coordinate i of g(y; theta).
  double eval(const Eigen::Ref<const Eigen::VectorXd>& point,
              const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::Index i) const {
    return gradient(point, theta)(i);
  }
};

/// Cumulative oracle calls. One call = all p partials at one point.
class OracleCallCounter {
 public:
  OracleCallCounter() = default;
  OracleCallCounter(const OracleCallCounter&) = delete;
  OracleCallCounter& operator=(const OracleCallCounter&) = delete;

  void add(std::uint64_t calls) { calls_.fetch_add(calls, std::memory_order_relaxed); }
  std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> calls_{0};
};

/// (1/n) sum_i g(x_i; theta). Adds n calls.
Eigen::VectorXd exact_full_gradient(const Dataset& ds, const Eigen::VectorXd& theta,
                                    const SampleGradientOracle& oracle,
                                    OracleCallCounter& counter);

/// Average of g over `batch` indices drawn uniformly with replacement. Adds `batch` calls.
Eigen::VectorXd minibatch_gradient(const Dataset& ds, const Eigen::VectorXd& theta,
                                   const SampleGradientOracle& oracle, Eigen::Index batch,
                                   std::mt19937_64& rng, OracleCallCounter& counter);

/// Oracle values at every grid point, one row per grid point (m^d x p).
/// Adds m^d calls.
Eigen::MatrixXd grid_gradients(const Grid<double>& grid, const Eigen::VectorXd& theta,
                               const SampleGradientOracle& oracle, OracleCallCounter& counter);

/// Interpolated full gradient: grid values are interpolated at every data point
/// with its precomputed weights, then averaged. Adds m^d calls.
Eigen::VectorXd lpi_gradient(const Dataset& ds, const Eigen::VectorXd& theta,
                             const SampleGradientOracle& oracle, const Grid<double>& grid,
                             std::span<const WeightSet<double>> weights,
                             OracleCallCounter& counter);

/// The interpolated gradient with the data average folded into one grid
/// weight vector: sum_y g(y; theta) * (1/n) sum_j w*_y(x_j).
class LpiGradientOperator {
 public:
  /// Computes weights for every dataset point. Throws DomainViolation or SingularMoment.
  LpiGradientOperator(const Dataset& ds, const InterpolationConfig& config);
  LpiGradientOperator(const Dataset& ds, const InterpolationConfig& config,
                      std::vector<WeightSet<double>> weights);

  const Grid<double>& grid() const { return grid_; }
  const std::vector<WeightSet<double>>& weights() const { return weights_; }
  const Eigen::VectorXd& aggregate() const { return aggregate_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& theta, const SampleGradientOracle& oracle,
                             OracleCallCounter& counter) const;

 private:
  Grid<double> grid_;
  std::vector<WeightSet<double>> weights_;
  Eigen::VectorXd aggregate_;
};

/// max over probes and coordinates of |phi_hat_i(x) - g_i(x; theta)|.
/// A finite-probe lower bound on the sup-norm interpolation error.
double sup_norm_error(const SampleGradientOracle& oracle, const Eigen::VectorXd& theta,
                      const Grid<double>& grid, const Eigen::MatrixXd& probe_points);

/// Dataset points followed by `extra` Kronecker-sequence points in [h, 1-h]^d.
Eigen::MatrixXd default_probe_points(const Dataset& ds, double bandwidth, Eigen::Index extra = 512);

/// ceil(C * (1/delta)^(1/eta)). Throws Overflow when m^d exceeds `max_grid_points`.
int grid_size_for_accuracy(double delta, double eta, int dim, double constant,
                           double max_grid_points = 1e8);

/// Gradient source used by the optimizers.
class GradientEstimator {
 public:
  virtual ~GradientEstimator() = default;
  virtual Eigen::VectorXd operator()(const Eigen::VectorXd& theta,
                                     OracleCallCounter& counter) const = 0;
  virtual std::uint64_t calls_per_evaluation() const = 0;
  virtual std::string name() const = 0;
};

class ExactGradient final : public GradientEstimator {
 public:
  ExactGradient(const Dataset& ds, const SampleGradientOracle& oracle) : ds_(ds), oracle_(oracle) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& theta, OracleCallCounter& counter) const override {
    return exact_full_gradient(ds_, theta, oracle_, counter);
  }
  std::uint64_t calls_per_evaluation() const override { return static_cast<std::uint64_t>(ds_.size()); }
  std::string name() const override { return "exact"; }

 private:
  const Dataset& ds_;
  const SampleGradientOracle& oracle_;
};

class InterpolatedGradient final : public GradientEstimator {
 public:
  InterpolatedGradient(const LpiGradientOperator& op, const SampleGradientOracle& oracle)
      : op_(op), oracle_(oracle) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& theta, OracleCallCounter& counter) const override {
    return op_(theta, oracle_, counter);
  }
  std::uint64_t calls_per_evaluation() const override {
    return static_cast<std::uint64_t>(op_.grid().size());
  }
  std::string name() const override { return "interpolated"; }

  const LpiGradientOperator& op() const { return op_; }

 private:
  const LpiGradientOperator& op_;
  const SampleGradientOracle& oracle_;
};

}  // namespace lpigrad
