#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpigrad/grid.hpp"
#include "lpigrad/oracle.hpp"
#include "lpigrad/problems.hpp"
#include "lpigrad/schedules.hpp"
#include "lpigrad/trace.hpp"

namespace lpigrad {

/// Runs abort when the objective exceeds this multiple of F(theta_0).
inline constexpr double kDivergenceFactor = 1e12;

// Step sizes default to 1/L1 of the problem when unset.

struct GdOptions {
  int iterations = 0;
  std::optional<double> step;
};

struct SgdOptions {
  int iterations = 0;
  std::optional<double> step;
  Eigen::Index batch = 500;
  std::uint64_t seed = 0;
  /// Use every sample once per step, in order, instead of random draws.
  bool full_batch = false;
};

struct LpiGdOptions {
  int iterations = 0;
  std::optional<double> step;
  /// Sup-norm accuracy the grid is meant to deliver; recorded, not enforced.
  double delta_target = 0.0;
};

enum class CatalystMode { theoretical, fixed_beta };

struct CatalystOptions {
  CatalystMode mode = CatalystMode::theoretical;
  int outer_iterations = 0;
  std::optional<double> step;
  /// Surrogate curvature; defaults to L1 - mu.
  std::optional<double> kappa;
  double beta = 0.99;
  int inner_budget = 1;
  int max_inner = 100000;
  double epsilon_constant = kCatalystEpsilonConstant;
  /// delta added (times sqrt(p)) to the inner gradient norm in the stop test.
  double delta_allowance = 0.0;
  /// F*; defaults to the problem's closed-form optimum.
  std::optional<double> f_star;
};

enum class FgmMode { theoretical, fixed_momentum };

struct FgmOptions {
  FgmMode mode = FgmMode::theoretical;
  /// Iteration budget for fixed_momentum; overrides the computed K in theoretical mode when set.
  std::optional<int> iterations;
  std::optional<double> step;
  double momentum = 0.2;
  double epsilon_target = 1e-3;
  /// (delta, L) of the inexact oracle; defaults to inexact_oracle_params().
  std::optional<InexactOracleParams> oracle_params;
  /// Called after each theoretical step with (state, theta_k, g_k, z_k).
  std::function<void(const FgmState&, const Eigen::VectorXd&, const Eigen::VectorXd&,
                     const Eigen::VectorXd&)>
      on_step;
};

Trace gd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0, const GdOptions& opts,
             OracleCallCounter& counter);

Trace sgd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0, const SgdOptions& opts,
              OracleCallCounter& counter);

Trace lpi_gd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
                 const GradientEstimator& gradient, const LpiGdOptions& opts,
                 OracleCallCounter& counter);

/// Builds the interpolation weights once, then runs LPI-GD.
Trace lpi_gd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
                 const InterpolationConfig& config, const LpiGdOptions& opts,
                 OracleCallCounter& counter);

Trace catalyst_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
                   const GradientEstimator& gradient, const CatalystOptions& opts,
                   OracleCallCounter& counter);

Trace fgm_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
              const GradientEstimator& gradient, const FgmOptions& opts,
              OracleCallCounter& counter);

/// Grid resolution for the theoretical FGM: grid_size_for_accuracy applied to
/// fgm_delta_requirement(eps, p, sigma). Heuristic: depends on the user constant C.
int fgm_theoretical_resolution(const SmoothnessConstants& c, int p, int dim, double eps,
                               double constant = 1.0);

// Inexact-oracle sandwich ----------------------------------------------------

struct SandwichViolation {
  Eigen::Index pair = 0;
  double G = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct SandwichReport {
  Eigen::Index pairs_checked = 0;
  std::vector<SandwichViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// G(t1, t2) = F(t1) - F(t2) - <g(t2), t1 - t2> checked against
/// mu/2 |D|^2 - delta_allow <= G <= L/2 |D|^2 + delta_allow, up to the rounding error of G.
SandwichReport inexact_sandwich_check(
    const ErmProblem& problem,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g_provider, double L, double mu,
    double delta_allow);

std::string to_string(CatalystMode m);
std::string to_string(FgmMode m);

}  // namespace lpigrad
