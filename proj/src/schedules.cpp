#include "lpigrad/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpigrad/errors.hpp"

namespace lpigrad {

namespace {

int clamped_ceil(double v) {
  if (!std::isfinite(v)) throw Overflow("iteration count is not finite");
  return std::max(1, static_cast<int>(std::ceil(v)));
}

}  // namespace

int lpi_iteration_count(const SmoothnessConstants& c, double gap0, int p, double eps) {
  if (!(eps > 0.0) || !(gap0 >= 0.0)) throw ConfigError("lpi_iteration_count: need eps > 0, gap0 >= 0");
  const double arg = (gap0 + p / (2.0 * c.mu)) / eps;
  if (arg <= 1.0) return 1;
  return clamped_ceil(c.sigma() * std::log(arg));
}

double lpi_delta_schedule(double eps, int p) {
  if (!(eps > 0.0) || p < 1) throw ConfigError("lpi_delta_schedule: need eps > 0, p >= 1");
  return std::sqrt(eps / p);
}

double catalyst_alpha_next(double alpha_prev, double q) {
  // a^2 + a (a_prev^2 - q) - a_prev^2 = 0
  const double a2 = alpha_prev * alpha_prev;
  const double b = a2 - q;
  const double disc = std::sqrt(b * b + 4.0 * a2);
  // Cancellation-free form of (-b + disc) / 2.
  return b > 0.0 ? 2.0 * a2 / (b + disc) : 0.5 * (disc - b);
}

double catalyst_beta(double alpha_prev, double alpha) {
  return alpha_prev * (1.0 - alpha_prev) / (alpha_prev * alpha_prev + alpha);
}

double catalyst_epsilon_schedule(int k, double sigma, double gap0, double constant) {
  return constant * gap0 * std::pow(1.0 - 1.0 / (3.0 * std::sqrt(sigma)), k);
}

bool inner_stop_check(double grad_norm, double mu_h, double eps_k) {
  // A few ulps of slack so boundary cases such as 0.2^2 / 2 <= 0.02 hold.
  constexpr double slack = 1.0 + 8.0 * std::numeric_limits<double>::epsilon();
  return grad_norm * grad_norm / (2.0 * mu_h) <= eps_k * slack;
}

CatalystState CatalystState::start(double mu, double kappa, const Eigen::VectorXd& theta0) {
  CatalystState s;
  s.kappa = kappa;
  s.q = mu / (mu + kappa);
  s.alpha = std::sqrt(s.q);
  s.z = theta0;
  return s;
}

InexactOracleParams inexact_oracle_params(const SmoothnessConstants& c, int p) {
  const double r = 1.0 - 1.0 / c.sigma();
  return {p * r * r, c.L1 * c.L1 + 2.0 - c.mu / 2.0};
}

double fgm_delta_requirement(double eps, int p, double sigma) {
  if (!(eps > 0.0)) throw ConfigError("fgm_delta_requirement: eps must be > 0");
  return eps / (2.0 * std::sqrt(static_cast<double>(p)) * (1.0 + sigma));
}

int fgm_iteration_count(double sigma, double L1, double dist0_sq, double eps) {
  if (!(eps > 0.0) || !(dist0_sq > 0.0))
    throw ConfigError("fgm_iteration_count: need eps > 0, dist0_sq > 0");
  const double arg = L1 * dist0_sq / eps;
  if (arg <= 1.0) return 1;
  // Slack so exact integers (e.g. 2*2*ln(e)) do not round up.
  return clamped_ceil(2.0 * std::sqrt(sigma) * std::log(arg) * (1.0 - 1e-12));
}

FgmState FgmState::start(double L, double mu, double delta, const Eigen::VectorXd& theta0) {
  if (!(L > mu)) throw DegenerateCurvature("fgm: need L > mu (got L = " + std::to_string(L) +
                                           ", mu = " + std::to_string(mu) + ")");
  FgmState s;
  s.L = L;
  s.mu = mu;
  s.delta = delta;
  s.alpha = L / (L - mu);
  s.A = s.alpha;
  s.theta0 = theta0;
  s.sum_theta = Eigen::VectorXd::Zero(theta0.size());
  s.sum_grad = Eigen::VectorXd::Zero(theta0.size());
  return s;
}

void FgmState::absorb(const Eigen::VectorXd& theta_k, const Eigen::VectorXd& g_k) {
  sum_theta += alpha * theta_k;
  sum_grad += alpha * g_k;
}

void FgmState::advance() {
  const auto c = fgm_coefficients(*this);
  alpha = c.alpha_next;
  A = c.A_next;
  ++k;
}

FgmCoefficients fgm_coefficients(const FgmState& state) {
  if (!(state.L > state.mu))
    throw DegenerateCurvature("fgm: L = mu makes the alpha recurrence undefined");
  FgmCoefficients c;
  c.alpha_next = (state.A * state.mu + state.L) / (state.L - state.mu);
  c.A_next = state.A + c.alpha_next;
  c.tau = c.alpha_next / c.A_next;
  return c;
}

Eigen::VectorXd fgm_y_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& g, double L) {
  return theta - g / L;
}

Eigen::VectorXd fgm_z_step(const FgmState& state) {
  return (state.L * state.theta0 + state.mu * state.sum_theta - state.sum_grad) /
         (state.L + state.mu * state.A);
}

}  // namespace lpigrad
