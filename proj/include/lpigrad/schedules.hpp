#pragma once

#include <Eigen/Core>

#include "lpigrad/smoothness.hpp"

namespace lpigrad {

// LPI-GD -------------------------------------------------------------------

/// ceil(sigma * ln((gap0 + p/(2 mu)) / eps)), at least 1.
int lpi_iteration_count(const SmoothnessConstants& c, double gap0, int p, double eps);

/// Constant per-iteration sup-norm target sqrt(eps / p).
double lpi_delta_schedule(double eps, int p);

// Catalyst -----------------------------------------------------------------

/// Positive root of a^2 = (1 - a) a_prev^2 + q a.
double catalyst_alpha_next(double alpha_prev, double q);

/// a_prev (1 - a_prev) / (a_prev^2 + a).
double catalyst_beta(double alpha_prev, double alpha);

inline constexpr double kCatalystEpsilonConstant = 2.0 / 9.0;

/// constant * gap0 * (1 - 1/(3 sqrt(sigma)))^k.
double catalyst_epsilon_schedule(int k, double sigma, double gap0,
                                 double constant = kCatalystEpsilonConstant);

/// grad_norm^2 / (2 mu_h) <= eps_k (to rounding): certifies h_k(theta) - h_k* <= eps_k
/// under mu_h-strong convexity.
bool inner_stop_check(double grad_norm, double mu_h, double eps_k);

struct CatalystState {
  double kappa = 0.0;
  double q = 1.0;  // mu / (mu + kappa)
  double alpha = 1.0;
  double beta = 0.0;
  double epsilon = 0.0;
  Eigen::VectorXd z;

  static CatalystState start(double mu, double kappa, const Eigen::VectorXd& theta0);
};

// Inexact-oracle fast gradient method ---------------------------------------

struct InexactOracleParams {
  double delta = 0.0;
  double L = 0.0;
};

/// delta = p (1 - 1/sigma)^2, L = L1^2 + 2 - mu/2.
InexactOracleParams inexact_oracle_params(const SmoothnessConstants& c, int p);

/// eps / (2 sqrt(p) (1 + sigma)).
double fgm_delta_requirement(double eps, int p, double sigma);

/// ceil(2 sqrt(sigma) ln(L1 * dist0_sq / eps)), at least 1.
int fgm_iteration_count(double sigma, double L1, double dist0_sq, double eps);

/// Recursion state of the estimate-sequence method. alpha and A hold
/// alpha_k and A_k for the current k; the running sums cover indices 0..k
/// once absorb() has been called for iteration k.
struct FgmState {
  double L = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  int k = 0;
  double alpha = 0.0;
  double A = 0.0;
  Eigen::VectorXd theta0;
  Eigen::VectorXd sum_theta;  // sum alpha_i theta_i
  Eigen::VectorXd sum_grad;   // sum alpha_i g_i

  /// alpha_0 = A_0 = L / (L - mu). Throws DegenerateCurvature when L <= mu.
  static FgmState start(double L, double mu, double delta, const Eigen::VectorXd& theta0);

  void absorb(const Eigen::VectorXd& theta_k, const Eigen::VectorXd& g_k);
  void advance();
};

struct FgmCoefficients {
  double alpha_next = 0.0;
  double A_next = 0.0;
  double tau = 0.0;
};

/// (L - mu) alpha_{k+1} = A_k mu + L; A_{k+1} = A_k + alpha_{k+1}; tau_k = alpha_{k+1}/A_{k+1}.
FgmCoefficients fgm_coefficients(const FgmState& state);

/// argmin <g, t - theta> + L/2 ||t - theta||^2 = theta - g / L.
Eigen::VectorXd fgm_y_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& g, double L);

/// Minimizer of the estimate function H: (L theta0 + mu S_theta - S_g) / (L + mu A_k).
Eigen::VectorXd fgm_z_step(const FgmState& state);

}  // namespace lpigrad
