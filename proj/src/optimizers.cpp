#include "lpigrad/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "lpigrad/errors.hpp"

namespace lpigrad {

namespace {

class Recorder {
 public:
  Recorder(const ErmProblem& problem, Trace& trace, const OracleCallCounter& counter,
           std::string method)
      : problem_(problem), trace_(trace), counter_(counter), method_(std::move(method)),
        start_(std::chrono::steady_clock::now()) {}

  void record(Eigen::Index k, const Eigen::VectorXd& theta) {
    const double f = problem_.objective(theta);
    if (trace_.records.empty()) initial_ = f;
    if (!theta.allFinite() || !std::isfinite(f))
      throw NonFinite(method_ + ": non-finite iterate at iteration " + std::to_string(k));
    if (initial_ > 0.0 && f > kDivergenceFactor * initial_)
      throw NonFinite(method_ + ": objective diverged at iteration " + std::to_string(k));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    trace_.records.push_back({k, theta, f, counter_.calls(), elapsed});
  }

 private:
  const ErmProblem& problem_;
  Trace& trace_;
  const OracleCallCounter& counter_;
  std::string method_;
  std::chrono::steady_clock::time_point start_;
  double initial_ = 0.0;
};

double resolve_step(const ErmProblem& problem, const std::optional<double>& step) {
  const double s = step ? *step : 1.0 / problem.smoothness().L1;
  if (!(s > 0.0)) throw ConfigError("step size must be > 0");
  return s;
}

void check_start(const ErmProblem& problem, const Eigen::VectorXd& theta0) {
  if (theta0.size() != problem.param_dim())
    throw ConfigError("theta0 has dimension " + std::to_string(theta0.size()) + ", problem has " +
                      std::to_string(problem.param_dim()));
}

}  // namespace

std::string to_string(CatalystMode m) {
  return m == CatalystMode::theoretical ? "theoretical" : "fixed_beta";
}

std::string to_string(FgmMode m) {
  return m == FgmMode::theoretical ? "theoretical" : "fixed_momentum";
}

Trace gd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0, const GdOptions& opts,
             OracleCallCounter& counter) {
  check_start(problem, theta0);
  const double step = resolve_step(problem, opts.step);
  Trace trace;
  trace.config = {{"method", "gd"}, {"step", step}, {"iterations", opts.iterations}};
  Recorder rec(problem, trace, counter, "gd");

  Eigen::VectorXd theta = theta0;
  rec.record(0, theta);
  for (int k = 1; k <= opts.iterations; ++k) {
    theta -= step * exact_full_gradient(problem.dataset(), theta, problem, counter);
    rec.record(k, theta);
  }
  return trace;
}

Trace sgd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0, const SgdOptions& opts,
              OracleCallCounter& counter) {
  check_start(problem, theta0);
  const double step = resolve_step(problem, opts.step);
  if (opts.batch < 1 || opts.batch > problem.dataset().size())
    throw ConfigError("sgd: batch size must lie in [1, n]");
  Trace trace;
  trace.seed = opts.seed;
  trace.config = {{"method", "sgd"},       {"step", step},
                  {"batch", opts.batch},   {"iterations", opts.iterations},
                  {"seed", opts.seed},     {"full_batch", opts.full_batch}};
  Recorder rec(problem, trace, counter, "sgd");

  std::mt19937_64 rng(opts.seed);
  Eigen::VectorXd theta = theta0;
  rec.record(0, theta);
  for (int k = 1; k <= opts.iterations; ++k) {
    const Eigen::VectorXd g =
        opts.full_batch
            ? exact_full_gradient(problem.dataset(), theta, problem, counter)
            : minibatch_gradient(problem.dataset(), theta, problem, opts.batch, rng, counter);
    theta -= step * g;
    rec.record(k, theta);
  }
  return trace;
}

Trace lpi_gd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
                 const GradientEstimator& gradient, const LpiGdOptions& opts,
                 OracleCallCounter& counter) {
  check_start(problem, theta0);
  const double step = resolve_step(problem, opts.step);
  Trace trace;
  trace.config = {{"method", "lpi_gd"},
                  {"step", step},
                  {"iterations", opts.iterations},
                  {"delta_target", opts.delta_target},
                  {"gradient", gradient.name()},
                  {"calls_per_iteration", gradient.calls_per_evaluation()}};
  Recorder rec(problem, trace, counter, "lpi_gd");

  Eigen::VectorXd theta = theta0;
  rec.record(0, theta);
  for (int k = 1; k <= opts.iterations; ++k) {
    theta -= step * gradient(theta, counter);
    rec.record(k, theta);
  }
  return trace;
}

Trace lpi_gd_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
                 const InterpolationConfig& config, const LpiGdOptions& opts,
                 OracleCallCounter& counter) {
  const LpiGradientOperator op(problem.dataset(), config);
  const InterpolatedGradient gradient(op, problem);
  return lpi_gd_run(problem, theta0, gradient, opts, counter);
}

Trace catalyst_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
                   const GradientEstimator& gradient, const CatalystOptions& opts,
                   OracleCallCounter& counter) {
  check_start(problem, theta0);
  const SmoothnessConstants consts = problem.smoothness();
  consts.validate();
  const double step = resolve_step(problem, opts.step);
  const double kappa = opts.kappa ? *opts.kappa : consts.L1 - consts.mu;
  if (!(kappa >= 0.0)) throw ConfigError("catalyst: kappa must be >= 0");
  // 1/L_h when step = 1/L_f; reduces to `step` when kappa = 0.
  const double inner_step = step / (1.0 + step * kappa);
  const double mu_h = consts.mu + kappa;
  const double allowance = opts.delta_allowance * std::sqrt(static_cast<double>(problem.param_dim()));

  Trace trace;
  trace.config = {{"method", "catalyst_lpi"},
                  {"mode", to_string(opts.mode)},
                  {"step", step},
                  {"inner_step", inner_step},
                  {"kappa", kappa},
                  {"beta", opts.beta},
                  {"inner_budget", opts.inner_budget},
                  {"outer_iterations", opts.outer_iterations},
                  {"epsilon_constant", opts.epsilon_constant},
                  {"delta_allowance", opts.delta_allowance},
                  {"gradient", gradient.name()}};
  Recorder rec(problem, trace, counter, "catalyst_lpi");

  double gap0 = 0.0;
  if (opts.mode == CatalystMode::theoretical) {
    double f_star = 0.0;
    if (opts.f_star) {
      f_star = *opts.f_star;
    } else if (auto opt = problem.optimum()) {
      f_star = opt->objective;
    } else {
      throw ConfigError("catalyst: theoretical mode needs F* (no closed-form optimum)");
    }
    gap0 = problem.objective(theta0) - f_star;
  }

  CatalystState state = CatalystState::start(consts.mu, kappa, theta0);
  Eigen::VectorXd theta_prev = theta0;
  rec.record(0, theta0);
  if (opts.mode == CatalystMode::theoretical && !(gap0 > 0.0)) return trace;

  for (int k = 1; k <= opts.outer_iterations; ++k) {
    Eigen::VectorXd theta = theta_prev;
    if (opts.mode == CatalystMode::theoretical) {
      state.epsilon = catalyst_epsilon_schedule(k, consts.sigma(), gap0, opts.epsilon_constant);
      for (int inner = 0;; ++inner) {
        const Eigen::VectorXd g = gradient(theta, counter) + kappa * (theta - state.z);
        if (inner_stop_check(g.norm() + allowance, mu_h, state.epsilon)) break;
        if (inner >= opts.max_inner)
          throw InnerStall("catalyst: inner loop did not certify eps_" + std::to_string(k) + " = " +
                           format_double(state.epsilon) + " within " +
                           std::to_string(opts.max_inner) + " iterations");
        theta -= inner_step * g;
      }
      const double alpha = catalyst_alpha_next(state.alpha, state.q);
      state.beta = catalyst_beta(state.alpha, alpha);
      state.alpha = alpha;
    } else {
      for (int inner = 0; inner < opts.inner_budget; ++inner)
        theta -= inner_step * (gradient(theta, counter) + kappa * (theta - state.z));
      state.beta = opts.beta;
    }
    state.z = theta + state.beta * (theta - theta_prev);
    theta_prev = theta;
    rec.record(k, theta);
  }
  return trace;
}

Trace fgm_run(const ErmProblem& problem, const Eigen::VectorXd& theta0,
              const GradientEstimator& gradient, const FgmOptions& opts,
              OracleCallCounter& counter) {
  check_start(problem, theta0);
  const SmoothnessConstants consts = problem.smoothness();
  Trace trace;
  Recorder rec(problem, trace, counter, "fgm_lpi");

  if (opts.mode == FgmMode::fixed_momentum) {
    const double step = resolve_step(problem, opts.step);
    const int iterations = opts.iterations.value_or(0);
    trace.config = {{"method", "fgm_lpi"}, {"mode", "fixed_momentum"}, {"step", step},
                    {"momentum", opts.momentum}, {"iterations", iterations},
                    {"gradient", gradient.name()}};
    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd prev = theta0;
    rec.record(0, theta);
    for (int k = 1; k <= iterations; ++k) {
      const Eigen::VectorXd v = theta + opts.momentum * (theta - prev);
      prev = theta;
      theta = v - step * gradient(v, counter);
      rec.record(k, theta);
    }
    return trace;
  }

  consts.validate();
  const int p = static_cast<int>(problem.param_dim());
  const InexactOracleParams params = opts.oracle_params.value_or(inexact_oracle_params(consts, p));
  int iterations = 0;
  if (opts.iterations) {
    iterations = *opts.iterations;
  } else {
    auto opt = problem.optimum();
    if (!opt) throw ConfigError("fgm: theoretical mode needs theta* to size K (or an explicit budget)");
    const double dist0_sq = (opt->theta - theta0).squaredNorm();
    iterations = dist0_sq > 0.0
                     ? fgm_iteration_count(consts.sigma(), consts.L1, dist0_sq, opts.epsilon_target)
                     : 1;
  }
  trace.config = {{"method", "fgm_lpi"},         {"mode", "theoretical"},
                  {"L", params.L},               {"mu", consts.mu},
                  {"delta", params.delta},       {"epsilon_target", opts.epsilon_target},
                  {"iterations", iterations},    {"gradient", gradient.name()}};

  FgmState state = FgmState::start(params.L, consts.mu, params.delta, theta0);
  Eigen::VectorXd theta = theta0;
  rec.record(0, theta0);
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd g = gradient(theta, counter);
    const Eigen::VectorXd y = fgm_y_step(theta, g, state.L);
    state.absorb(theta, g);
    const Eigen::VectorXd z = fgm_z_step(state);
    if (opts.on_step) opts.on_step(state, theta, g, z);
    const FgmCoefficients c = fgm_coefficients(state);
    theta = c.tau * z + (1.0 - c.tau) * y;
    state.advance();
    rec.record(k + 1, y);
  }
  return trace;
}

int fgm_theoretical_resolution(const SmoothnessConstants& c, int p, int dim, double eps,
                               double constant) {
  return grid_size_for_accuracy(fgm_delta_requirement(eps, p, c.sigma()), c.eta, dim, constant);
}

SandwichReport inexact_sandwich_check(
    const ErmProblem& problem,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g_provider, double L, double mu,
    double delta_allow) {
  SandwichReport report;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [t1, t2] = pairs[k];
    const Eigen::VectorXd delta = t1 - t2;
    const double f1 = problem.objective(t1);
    const double f2 = problem.objective(t2);
    const double lin = g_provider(t2).dot(delta);
    const double G = f1 - f2 - lin;
    const double sq = delta.squaredNorm();
    const double lower = 0.5 * mu * sq - delta_allow;
    const double upper = 0.5 * L * sq + delta_allow;
    // Rounding in G is of order eps * (|F1| + |F2| + |<g, D>|); bounds that hold with
    // equality (curvature exactly mu or L) must not be reported.
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(f1) + std::abs(f2) + std::abs(lin));
    if (!(G >= lower - tol && G <= upper + tol))
      report.violations.push_back({static_cast<Eigen::Index>(k), G, lower, upper});
    ++report.pairs_checked;
  }
  return report;
}

}  // namespace lpigrad
