#include <doctest.h>

#include <cmath>

#include "lpigrad/errors.hpp"
#include "lpigrad/schedules.hpp"

using namespace lpigrad;

namespace {
SmoothnessConstants consts(double L1, double mu) {
  SmoothnessConstants c;
  c.L1 = L1;
  c.mu = mu;
  return c;
}
}  // namespace

TEST_CASE("LPI-GD iteration count and accuracy schedule") {
  CHECK(lpi_iteration_count(consts(5.0, 0.5), 1.0, 1, 0.1) == 30);
  CHECK(lpi_iteration_count(consts(10.0, 0.5), 1.0, 1, 0.1) == 60);  // sigma doubled
  CHECK(lpi_iteration_count(consts(5.0, 0.5), 1.0, 1, 2.0) == 1);
  CHECK(lpi_iteration_count(consts(5.0, 0.5), 1.0, 1, 50.0) == 1);

  CHECK(lpi_delta_schedule(0.01, 1) == doctest::Approx(0.1));
  CHECK(lpi_delta_schedule(0.01, 4) == doctest::Approx(0.05));
  CHECK(lpi_delta_schedule(1.0, 1) == 1.0);
}

TEST_CASE("Catalyst alpha and beta") {
  CHECK(catalyst_alpha_next(0.5, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(catalyst_alpha_next(1.0, 0.0) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));

  for (double q : {1e-8, 1e-3, 0.1, 0.5, 0.9}) {
    double a = 1.0;
    for (int k = 0; k < 50; ++k) {
      const double next = catalyst_alpha_next(a, q);
      CHECK(std::abs(next * next - ((1 - next) * a * a + q * next)) <= 1e-12);
      CHECK(next > 0.0);
      CHECK(next < 1.0);
      const double beta = catalyst_beta(a, next);
      CHECK(beta >= 0.0);
      CHECK(beta < 1.0);
      a = next;
    }
    // sqrt(q) is a fixed point
    double f = std::sqrt(q);
    for (int k = 0; k < 50; ++k) f = catalyst_alpha_next(f, q);
    CHECK(std::abs(f - std::sqrt(q)) <= 1e-12);
  }

  CHECK(catalyst_beta(0.5, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(catalyst_beta(1.0, 0.3) == 0.0);
}

TEST_CASE("Catalyst inner accuracy schedule") {
  CHECK(catalyst_epsilon_schedule(0, 4.0, 1.0) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(catalyst_epsilon_schedule(2, 4.0, 1.0) == doctest::Approx(2.0 / 9.0 * 25.0 / 36.0).epsilon(1e-15));
  for (int k = 0; k < 10; ++k) {
    const double ratio = catalyst_epsilon_schedule(k + 1, 9.0, 3.0) / catalyst_epsilon_schedule(k, 9.0, 3.0);
    CHECK(ratio == doctest::Approx(1.0 - 1.0 / 9.0).epsilon(1e-14));
  }
  const auto s = CatalystState::start(1.0, 3.0, Eigen::VectorXd::Ones(2));
  CHECK(s.q == doctest::Approx(0.25));
  CHECK(s.alpha == doctest::Approx(0.5));
  CHECK(s.z == Eigen::VectorXd::Ones(2));
}

TEST_CASE("inner stopping certificate") {
  CHECK(inner_stop_check(0.0, 1.0, 1e-30));
  CHECK(inner_stop_check(0.2, 1.0, 0.02));
  CHECK_FALSE(inner_stop_check(0.2, 1.0, 0.019));
}

TEST_CASE("inexact oracle constants") {
  const auto p = inexact_oracle_params(consts(2.0, 1.0), 3);
  CHECK(p.delta == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p.L == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(inexact_oracle_params(consts(1.5, 1.5), 2).delta == 0.0);
  for (double L1 : {1.0, 1.5, 4.0})
    for (double mu : {0.1, 0.5, 1.0})
      if (L1 >= mu) CHECK(inexact_oracle_params(consts(L1, mu), 1).L > mu);

  CHECK(fgm_delta_requirement(0.01, 1, 4.0) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(fgm_delta_requirement(0.01, 4, 4.0) == doctest::Approx(0.0005).epsilon(1e-15));
  CHECK(fgm_delta_requirement(0.03, 4, 4.0) == doctest::Approx(3 * fgm_delta_requirement(0.01, 4, 4.0)));
}

TEST_CASE("FGM iteration count") {
  CHECK(fgm_iteration_count(4.0, 1.0, 1.0, std::exp(-1.0)) == 4);
  CHECK(fgm_iteration_count(16.0, 1.0, 1.0, std::exp(-1.0)) == 8);
  CHECK(fgm_iteration_count(4.0, 1.0, 1.0, 2.0) == 1);
}

TEST_CASE("FGM coefficients") {
  auto s = FgmState::start(2.0, 1.0, 0.0, Eigen::VectorXd::Zero(1));
  CHECK(s.alpha == 2.0);
  CHECK(s.A == 2.0);
  const auto c = fgm_coefficients(s);
  CHECK(c.alpha_next == 4.0);
  CHECK(c.A_next == 6.0);
  CHECK(c.tau == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  auto z = FgmState::start(3.0, 0.0, 0.0, Eigen::VectorXd::Zero(1));
  for (int k = 0; k < 8; ++k) {
    CHECK(z.alpha == 1.0);
    CHECK(z.A == k + 1.0);
    CHECK(fgm_coefficients(z).tau == doctest::Approx(1.0 / (k + 2)).epsilon(1e-15));
    z.absorb(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    z.advance();
  }

  auto t = FgmState::start(5.5, 0.4, 0.0, Eigen::VectorXd::Zero(1));
  for (int k = 0; k < 30; ++k) {
    const double A = t.A;
    const auto cc = fgm_coefficients(t);
    CHECK(cc.tau > 0.0);
    CHECK(cc.tau < 1.0);
    t.absorb(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    t.advance();
    CHECK(t.A == A + cc.alpha_next);
    CHECK(t.A > A);
  }

  CHECK_THROWS_AS(FgmState::start(1.0, 1.0, 0.0, Eigen::VectorXd::Zero(1)), DegenerateCurvature);
  auto bad = s;
  bad.mu = bad.L;
  CHECK_THROWS_AS(fgm_coefficients(bad), DegenerateCurvature);
}

TEST_CASE("FGM steps") {
  const Eigen::VectorXd y = fgm_y_step(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5), 2.0);
  CHECK(y(0) == doctest::Approx(0.75));
  const Eigen::Vector2d th(0.3, -0.4), g(1.0, 2.0);
  CHECK(fgm_y_step(th, Eigen::Vector2d::Zero(), 3.0) == th);
  const Eigen::VectorXd y2 = fgm_y_step(th, g, 3.0);
  CHECK((g + 3.0 * (y2 - th)).cwiseAbs().maxCoeff() <= 1e-12);

  auto s = FgmState::start(2.0, 1.0, 0.0, Eigen::VectorXd::Zero(1));
  s.absorb(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.0));
  CHECK(fgm_z_step(s)(0) == doctest::Approx(-0.5));

  auto anchor = FgmState::start(2.0, 1.0, 0.0, Eigen::VectorXd::Constant(1, 0.7));
  for (int k = 0; k < 3; ++k) {
    anchor.absorb(Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Zero(1));
    CHECK(fgm_z_step(anchor)(0) == doctest::Approx(0.7).epsilon(1e-15));
    anchor.advance();
  }
}
