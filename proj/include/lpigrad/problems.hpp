#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lpigrad/dataset.hpp"
#include "lpigrad/multi_index.hpp"
#include "lpigrad/oracle.hpp"
#include "lpigrad/smoothness.hpp"

namespace lpigrad {

struct Optimum {
  Eigen::VectorXd theta;
  double objective = 0.0;
};

/// Empirical risk F(theta) = (1/n) sum_i f(x_i; theta) together with its
/// domain-wide per-sample gradient oracle.
class ErmProblem : public SampleGradientOracle {
 public:
  virtual const Dataset& dataset() const = 0;

  /// Per-sample loss f(y; theta), using the same label rule as gradient().
  virtual double loss(const Eigen::Ref<const Eigen::VectorXd>& point,
                      const Eigen::Ref<const Eigen::VectorXd>& theta) const = 0;

  virtual double objective(const Eigen::Ref<const Eigen::VectorXd>& theta) const;

  virtual std::optional<Optimum> optimum() const { return std::nullopt; }
  virtual SmoothnessConstants smoothness() const = 0;

  int data_dim() const override { return dataset().dim(); }
};

enum class LabelRule {
  noiseless_model,  // w_init * y at non-dataset points
  noisy_model,      // w_init * y + seeded N(0, noise_std^2), fixed per point
};

std::string to_string(LabelRule r);
LabelRule parse_label_rule(const std::string& s);

/// 1-D least squares F(w) = (1/n) sum (w x_i - y_i)^2 with labels
/// y_i = w_init x_i + N(0, noise_std^2).
class LinearRegressionProblem final : public ErmProblem {
 public:
  LinearRegressionProblem(Dataset ds, double w_init, double noise_std, std::uint64_t seed,
                          LabelRule rule = LabelRule::noiseless_model);

  const Dataset& dataset() const override { return ds_; }
  Eigen::Index param_dim() const override { return 1; }

  void gradient(const Eigen::Ref<const Eigen::VectorXd>& point,
                const Eigen::Ref<const Eigen::VectorXd>& theta,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  using SampleGradientOracle::gradient;

  double loss(const Eigen::Ref<const Eigen::VectorXd>& point,
              const Eigen::Ref<const Eigen::VectorXd>& theta) const override;
  double objective(const Eigen::Ref<const Eigen::VectorXd>& theta) const override;

  std::optional<Optimum> optimum() const override;
  SmoothnessConstants smoothness() const override;

  /// Label at a domain point: stored label at dataset points, model label elsewhere.
  double label_at(double x) const;

  double w_init() const { return w_init_; }
  double noise_std() const { return noise_std_; }
  std::uint64_t seed() const { return seed_; }
  LabelRule label_rule() const { return rule_; }

  /// Hoelder exponent reported by smoothness(); the data-space gradient is quadratic.
  double eta = 2.0;

 private:
  Dataset ds_;
  double w_init_;
  double noise_std_;
  std::uint64_t seed_;
  LabelRule rule_;
};

LinearRegressionProblem generate_linear_regression(Eigen::Index n, double margin, double noise_std,
                                                   std::uint64_t seed,
                                                   LabelRule rule = LabelRule::noiseless_model);

/// Writes `<stem>.csv` (dataset) and `<stem>.json` (w_init, noise_std, seed, label_rule, margin).
void save_problem(const LinearRegressionProblem& prob, const std::filesystem::path& stem);
LinearRegressionProblem load_problem(const std::filesystem::path& stem);

/// f(x; theta) = c/2 ||theta||^2 - theta . P(x), with P_i polynomials of total
/// degree <= `degree` in the data point. The data-space gradient
/// g_i = c theta_i - P_i(x) is therefore a polynomial of that degree.
class PolyGradientProblem final : public ErmProblem {
 public:
  /// coefficients: one row per parameter coordinate, one column per monomial x^s
  /// of MultiIndexSet(dim, degree).
  PolyGradientProblem(Dataset ds, int degree, Eigen::MatrixXd coefficients, double curvature = 1.0);

  const Dataset& dataset() const override { return ds_; }
  Eigen::Index param_dim() const override { return coefficients_.rows(); }

  void gradient(const Eigen::Ref<const Eigen::VectorXd>& point,
                const Eigen::Ref<const Eigen::VectorXd>& theta,
                Eigen::Ref<Eigen::VectorXd> out) const override;
  using SampleGradientOracle::gradient;

  double loss(const Eigen::Ref<const Eigen::VectorXd>& point,
              const Eigen::Ref<const Eigen::VectorXd>& theta) const override;

  std::optional<Optimum> optimum() const override;
  SmoothnessConstants smoothness() const override;

  int degree() const { return monomials_.order(); }
  Eigen::VectorXd polynomial(const Eigen::Ref<const Eigen::VectorXd>& point) const;

 private:
  Dataset ds_;
  MultiIndexSet monomials_;
  Eigen::MatrixXd coefficients_;
  double curvature_;
};

PolyGradientProblem make_poly_gradient_problem(int dim, int params, int degree, Eigen::Index n,
                                               double margin, std::uint64_t seed,
                                               double curvature = 1.0);

}  // namespace lpigrad
