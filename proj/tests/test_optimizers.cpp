#include <doctest.h>

#include <cmath>
#include <random>

#include "lpigrad/errors.hpp"
#include "lpigrad/optimizers.hpp"

using namespace lpigrad;

namespace {

Eigen::VectorXd v1(double w) { return Eigen::VectorXd::Constant(1, w); }

InterpolationConfig config1d(int m, double h, int l = 1) {
  InterpolationConfig c;
  c.resolution = m;
  c.bandwidth = h;
  c.order = l;
  return c;
}

double max_theta_gap(const Trace& a, const Trace& b) {
  REQUIRE(a.records.size() == b.records.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.records.size(); ++k)
    worst = std::max(worst, (a.records[k].theta - b.records[k].theta).cwiseAbs().maxCoeff());
  return worst;
}

// F = 1/2 |theta|^2
PolyGradientProblem half_square(int p) {
  Eigen::MatrixXd pts(1, 3);
  pts << 0.3, 0.5, 0.7;
  return PolyGradientProblem(Dataset(pts, std::nullopt, 0.1), 0, Eigen::MatrixXd::Zero(p, 1), 1.0);
}

// The reference setting: n = 1000, margin 0.01, noise 0.05, step 1.0, w0 = 0.4.
struct Reference {
  LinearRegressionProblem problem = generate_linear_regression(1000, 0.01, 0.05, 42);
  LpiGradientOperator op{problem.dataset(), config1d(500, 0.01)};
  InterpolatedGradient lpi{op, problem};
  double f_star = problem.optimum()->objective;
};

}  // namespace

TEST_CASE("gradient descent") {
  OracleCallCounter counter;
  const auto sq = half_square(2);
  const Trace one = gd_run(sq, Eigen::Vector2d(3.0, -1.0), GdOptions{1, std::nullopt}, counter);
  REQUIRE(one.records.size() == 2);
  CHECK(one.back().theta.cwiseAbs().maxCoeff() == 0.0);

  const Trace none = gd_run(sq, Eigen::Vector2d(3.0, -1.0), GdOptions{0, std::nullopt}, counter);
  CHECK(none.records.size() == 1);

  const auto prob = generate_linear_regression(300, 0.01, 0.05, 6);
  const auto c = prob.smoothness();
  const double w_star = prob.optimum()->theta(0);
  OracleCallCounter calls;
  const Trace t = gd_run(prob, v1(-1.5), GdOptions{50, std::nullopt}, calls);
  CHECK(calls.calls() == 50u * 300u);
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    const double prev = std::abs(t.records[k - 1].theta(0) - w_star);
    const double cur = std::abs(t.records[k].theta(0) - w_star);
    // On a quadratic the ratio equals the bound; keep the rounding of theta
    // (about 1e-16 / prev) well under the 1e-10 slack.
    if (prev > 1e-4) CHECK(cur / prev <= 1.0 - c.mu / c.L1 + 1e-10);
  }
}

TEST_CASE("divergence is reported as NonFinite") {
  OracleCallCounter counter;
  const auto prob = generate_linear_regression(100, 0.01, 0.05, 6);
  CHECK_THROWS_AS(gd_run(prob, v1(0.4), GdOptions{200, 50.0}, counter), NonFinite);
}

TEST_CASE("stochastic gradient descent") {
  const auto prob = generate_linear_regression(1000, 0.01, 0.05, 42);
  OracleCallCounter c1, c2;
  SgdOptions full;
  full.iterations = 50;
  full.full_batch = true;
  full.batch = 1000;
  const Trace s = sgd_run(prob, v1(0.4), full, c1);
  const Trace g = gd_run(prob, v1(0.4), GdOptions{50, std::nullopt}, c2);
  CHECK(max_theta_gap(s, g) <= 1e-12);

  SgdOptions o;
  o.iterations = 30;
  o.step = 1.0;
  o.seed = 5;
  OracleCallCounter a, b;
  const Trace r1 = sgd_run(prob, v1(0.4), o, a);
  const Trace r2 = sgd_run(prob, v1(0.4), o, b);
  CHECK(max_theta_gap(r1, r2) == 0.0);
  CHECK(a.calls() == 30u * 500u);

  o.iterations = 200;
  OracleCallCounter d, e;
  const double sgd_final = sgd_run(prob, v1(0.4), o, d).back().objective;
  const double gd_final = gd_run(prob, v1(0.4), GdOptions{200, 1.0}, e).back().objective;
  CHECK(std::abs(sgd_final - gd_final) <= 0.1 * gd_final);
}

TEST_CASE("LPI-GD reduces to GD when interpolation is exact") {
  const auto poly = make_poly_gradient_problem(1, 2, 1, 300, 0.05, 10, 1.0);
  OracleCallCounter a, b;
  const Trace lpi = lpi_gd_run(poly, Eigen::Vector2d(2.0, -1.0), config1d(80, 0.05), LpiGdOptions{40, std::nullopt, 0.0}, a);
  const Trace gd = gd_run(poly, Eigen::Vector2d(2.0, -1.0), GdOptions{40, std::nullopt}, b);
  CHECK(max_theta_gap(lpi, gd) <= 1e-6);
  CHECK(a.calls() == 40u * 80u);

  OracleCallCounter c;
  CHECK(lpi_gd_run(poly, Eigen::Vector2d(2.0, -1.0), config1d(80, 0.05), LpiGdOptions{}, c).records.size() == 1);
}

TEST_CASE("LPI-GD in the reference setting") {
  Reference ref;
  OracleCallCounter a, b;
  const Trace lpi = lpi_gd_run(ref.problem, v1(0.4), ref.lpi, LpiGdOptions{200, 1.0, 0.0}, a);
  const Trace gd = gd_run(ref.problem, v1(0.4), GdOptions{200, 1.0}, b);
  for (std::size_t k = 2; k < lpi.records.size(); ++k)
    CHECK(lpi.records[k].objective <= lpi.records[k - 1].objective + 1e-15);
  CHECK(lpi.back().objective <= 1.1 * gd.back().objective);
  CHECK(a.calls() == 200u * 500u);
}

TEST_CASE("Catalyst") {
  Reference ref;
  OracleCallCounter a, b;
  CatalystOptions reduce;
  reduce.mode = CatalystMode::fixed_beta;
  reduce.kappa = 0.0;
  reduce.beta = 0.0;
  reduce.inner_budget = 1;
  reduce.outer_iterations = 50;
  reduce.step = 1.0;
  const Trace cat = catalyst_run(ref.problem, v1(0.4), ref.lpi, reduce, a);
  const Trace lpi = lpi_gd_run(ref.problem, v1(0.4), ref.lpi, LpiGdOptions{50, 1.0, 0.0}, b);
  CHECK(max_theta_gap(cat, lpi) <= 1e-12);

  CatalystOptions fixed;
  fixed.mode = CatalystMode::fixed_beta;
  fixed.beta = 0.99;
  fixed.outer_iterations = 200;
  fixed.step = 1.0;
  OracleCallCounter c, d;
  const double cat_final = catalyst_run(ref.problem, v1(0.4), ref.lpi, fixed, c).back().objective;
  const double lpi_final = lpi_gd_run(ref.problem, v1(0.4), ref.lpi, LpiGdOptions{200, 1.0, 0.0}, d).back().objective;
  CHECK(std::abs(cat_final - lpi_final) <= 1e-3 * lpi_final);
}

TEST_CASE("Catalyst theoretical mode converges with exact gradients") {
  const auto prob = generate_linear_regression(500, 0.01, 0.05, 13);
  const ExactGradient exact(prob.dataset(), prob);
  CatalystOptions o;
  o.outer_iterations = 150;
  OracleCallCounter counter;
  const Trace t = catalyst_run(prob, v1(-1.0), exact, o, counter);
  const double f_star = prob.optimum()->objective;
  const double gap0 = t.records.front().objective - f_star;
  CHECK(t.back().objective - f_star <= 1e-10 * gap0);

  o.max_inner = 0;
  OracleCallCounter c2;
  CHECK_THROWS_AS(catalyst_run(prob, v1(-1.0), exact, o, c2), InnerStall);
}

TEST_CASE("FGM fixed momentum") {
  Reference ref;
  FgmOptions zero;
  zero.mode = FgmMode::fixed_momentum;
  zero.momentum = 0.0;
  zero.iterations = 50;
  zero.step = 1.0;
  OracleCallCounter a, b;
  const Trace f = fgm_run(ref.problem, v1(0.4), ref.lpi, zero, a);
  const Trace lpi = lpi_gd_run(ref.problem, v1(0.4), ref.lpi, LpiGdOptions{50, 1.0, 0.0}, b);
  CHECK(max_theta_gap(f, lpi) <= 1e-12);

  FgmOptions mom = zero;
  mom.momentum = 0.2;
  mom.iterations = 200;
  OracleCallCounter c, d;
  const Trace fast = fgm_run(ref.problem, v1(0.4), ref.lpi, mom, c);
  const Trace slow = lpi_gd_run(ref.problem, v1(0.4), ref.lpi, LpiGdOptions{200, 1.0, 0.0}, d);
  const auto kf = fast.iterations_to_threshold(ref.f_star, 1e-3);
  const auto ks = slow.iterations_to_threshold(ref.f_star, 1e-3);
  REQUIRE(kf >= 0);
  REQUIRE(ks >= 0);
  CHECK(kf < ks);
}

TEST_CASE("FGM theoretical mode") {
  const auto prob = generate_linear_regression(500, 0.01, 0.05, 17);
  const ExactGradient exact(prob.dataset(), prob);
  const double f_star = prob.optimum()->objective;

  struct Step {
    double alpha;
    Eigen::VectorXd theta, g;
  };
  std::vector<Step> history;
  double worst_stationarity = 0.0;
  FgmOptions o;
  o.epsilon_target = 1e-6;
  o.on_step = [&](const FgmState& s, const Eigen::VectorXd& th, const Eigen::VectorXd& g, const Eigen::VectorXd& z) {
    history.push_back({s.alpha, th, g});
    Eigen::VectorXd grad = s.L * (z - s.theta0);
    for (const auto& h : history) grad += h.alpha * (h.g + s.mu * (z - h.theta));
    worst_stationarity = std::max(worst_stationarity, grad.cwiseAbs().maxCoeff());
  };
  OracleCallCounter counter;
  const Trace t = fgm_run(prob, v1(-2.0), exact, o, counter);
  CHECK(history.size() + 1 == t.records.size());
  CHECK(worst_stationarity <= 1e-10);
  CHECK(t.back().objective - f_star <= o.epsilon_target);

  // constants with L = mu are rejected
  FgmOptions bad;
  bad.oracle_params = InexactOracleParams{0.0, prob.smoothness().mu};
  OracleCallCounter c2;
  CHECK_THROWS_AS(fgm_run(prob, v1(0.0), exact, bad, c2), DegenerateCurvature);
}

TEST_CASE("inexact-oracle sandwich") {
  const auto prob = generate_linear_regression(300, 0.01, 0.05, 23);
  const auto c = prob.smoothness();
  OracleCallCounter counter;
  auto exact = [&](const Eigen::VectorXd& t) { return exact_full_gradient(prob.dataset(), t, prob, counter); };

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
  for (int k = 0; k < 100; ++k) pairs.emplace_back(v1(u(rng)), v1(u(rng)));
  CHECK(inexact_sandwich_check(prob, pairs, exact, c.L1, c.mu, 0.0).passed());

  // A bias b breaks the lower bound once |D| b > mu/2 |D|^2 + (curvature gap), e.g. D small.
  const double b = 0.1;
  auto biased = [&](const Eigen::VectorXd& t) { Eigen::VectorXd g = exact(t); g(0) += b; return g; };
  const double d = b / c.mu;  // |D| = b/mu: G = mu_F/2 D^2 - b D < mu/2 D^2
  const auto report = inexact_sandwich_check(prob, {{v1(0.5 + d), v1(0.5)}}, biased, c.L1, c.mu, 0.0);
  CHECK_FALSE(report.passed());
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].G < report.violations[0].lower);
}

TEST_CASE("runs are deterministic") {
  Reference ref;
  OracleCallCounter a, b;
  FgmOptions o;
  o.mode = FgmMode::fixed_momentum;
  o.iterations = 30;
  o.step = 1.0;
  const Trace t1 = fgm_run(ref.problem, v1(0.1), ref.lpi, o, a);
  const Trace t2 = fgm_run(ref.problem, v1(0.1), ref.lpi, o, b);
  for (std::size_t k = 0; k < t1.records.size(); ++k) {
    CHECK(t1.records[k].objective == t2.records[k].objective);
    CHECK(t1.records[k].oracle_calls == t2.records[k].oracle_calls);
  }
}
