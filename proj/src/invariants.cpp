#include "lpigrad/invariants.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "lpigrad/oracle.hpp"
#include "lpigrad/problems.hpp"
#include "lpigrad/schedules.hpp"
#include "lpigrad/weights.hpp"

namespace lpigrad {

namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

InvariantResult guarded(const std::string& name, const std::function<InvariantResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

InterpolationConfig small_config(int dim, int m, double h, int order) {
  InterpolationConfig c;
  c.dim = dim;
  c.resolution = m;
  c.bandwidth = h;
  c.order = order;
  return c;
}

Eigen::VectorXd random_point(int dim, double h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(h, 1.0 - h);
  Eigen::VectorXd x(dim);
  for (int j = 0; j < dim; ++j) x(j) = u(rng);
  return x;
}

}  // namespace

std::vector<InvariantResult> run_invariants(std::uint64_t seed) {
  std::vector<InvariantResult> out;
  std::mt19937_64 rng(seed);

  out.push_back(guarded("polynomial_reproduction", [&] {
    double worst = 0.0;
    for (int dim : {1, 2}) {
      for (int order : {0, 1, 2}) {
        const Grid<double> grid(small_config(dim, dim == 1 ? 40 : 20, 0.15, order));
        const MultiIndexSet& basis = grid.basis();
        std::normal_distribution<double> n01;
        Eigen::VectorXd coef(basis.size());
        for (Eigen::Index k = 0; k < coef.size(); ++k) coef(k) = n01(rng);
        auto poly = [&](const Eigen::VectorXd& y) { return coef.dot(basis_vector(y, basis)); };
        Eigen::VectorXd values(grid.size());
        for (Eigen::Index g = 0; g < grid.size(); ++g) values(g) = poly(grid.point(g));
        for (int t = 0; t < 10; ++t) {
          const Eigen::VectorXd x = random_point(dim, 0.15, rng);
          const auto ws = interpolation_weights(x, grid);
          worst = std::max(worst, std::abs(interpolate(values, ws) - poly(x)));
        }
      }
    }
    return InvariantResult{"polynomial_reproduction", worst < 1e-9, fmt("max error %.3g", worst)};
  }));

  out.push_back(guarded("partition_and_support", [&] {
    const double h = 0.1;
    const Grid<double> grid(small_config(2, 25, h, 1));
    double worst_sum = 0.0;
    bool support_ok = true;
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd x = random_point(2, h, rng);
      const auto ws = interpolation_weights(x, grid);
      worst_sum = std::max(worst_sum, std::abs(ws.sum() - 1.0));
      for (auto g : ws.indices)
        if ((grid.point(g) - x).cwiseAbs().maxCoeff() > h * (1.0 + 1e-9)) support_ok = false;
    }
    return InvariantResult{"partition_and_support", worst_sum < 1e-10 && support_ok,
                           fmt("max |sum - 1| %.3g", worst_sum) + (support_ok ? "" : ", weight outside window")};
  }));

  out.push_back(guarded("moment_symmetry", [&] {
    const Grid<double> grid(small_config(2, 20, 0.15, 2));
    const Eigen::MatrixXd B = moment_matrix(random_point(2, 0.15, rng), grid);
    const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
    return InvariantResult{"moment_symmetry", asym == 0.0, fmt("max asymmetry %.3g", asym)};
  }));

  out.push_back(guarded("batch_matches_pointwise", [&] {
    const Grid<double> grid(small_config(1, 100, 0.05, 1));
    Eigen::MatrixXd xs(1, 50);
    for (Eigen::Index c = 0; c < xs.cols(); ++c) xs(0, c) = 0.05 + 0.85 * double(c % 10) / 9.0 + 1e-3 * double(c / 10);
    const auto batch = batch_weights(xs, grid);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < xs.cols(); ++c) {
      const auto single = interpolation_weights(xs.col(c), grid);
      if (single.indices != batch[c].indices) return InvariantResult{"batch_matches_pointwise", false, "support differs"};
      worst = std::max(worst, (single.values - batch[c].values).cwiseAbs().maxCoeff());
    }
    return InvariantResult{"batch_matches_pointwise", worst < 1e-12, fmt("max difference %.3g", worst)};
  }));

  out.push_back(guarded("oracle_accounting", [&] {
    const auto prob = generate_linear_regression(200, 0.05, 0.05, seed);
    const InterpolationConfig cfg = small_config(1, 50, 0.05, 1);
    const LpiGradientOperator op(prob.dataset(), cfg);
    OracleCallCounter counter;
    const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.3);
    exact_full_gradient(prob.dataset(), theta, prob, counter);
    const auto after_exact = counter.calls();
    op(theta, prob, counter);
    const auto after_lpi = counter.calls();
    const bool ok = after_exact == 200 && after_lpi == 250;
    return InvariantResult{"oracle_accounting", ok,
                           "exact " + std::to_string(after_exact) + ", +lpi " + std::to_string(after_lpi - after_exact)};
  }));

  out.push_back(guarded("lpi_routes_agree", [&] {
    const auto prob = generate_linear_regression(300, 0.05, 0.05, seed + 1);
    const InterpolationConfig cfg = small_config(1, 80, 0.05, 1);
    const LpiGradientOperator op(prob.dataset(), cfg);
    OracleCallCounter counter;
    const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 0.7);
    const Eigen::VectorXd a = op(theta, prob, counter);
    const Eigen::VectorXd b = lpi_gradient(prob.dataset(), theta, prob, op.grid(), op.weights(), counter);
    const double diff = (a - b).cwiseAbs().maxCoeff();
    return InvariantResult{"lpi_routes_agree", diff < 1e-12, fmt("difference %.3g", diff)};
  }));

  out.push_back(guarded("catalyst_alpha_root", [&] {
    double worst = 0.0;
    for (double q : {1e-4, 0.01, 0.3, 1.0}) {
      double a = std::sqrt(q);
      for (int k = 0; k < 20; ++k) {
        const double next = catalyst_alpha_next(a, q);
        worst = std::max(worst, std::abs(next * next - ((1.0 - next) * a * a + q * next)));
        a = next;
      }
    }
    return InvariantResult{"catalyst_alpha_root", worst < 1e-14, fmt("max residual %.3g", worst)};
  }));

  out.push_back(guarded("fgm_coefficients", [&] {
    auto s = FgmState::start(4.0, 1.0, 0.0, Eigen::VectorXd::Zero(1));
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const auto c = fgm_coefficients(s);
      worst = std::max(worst, std::abs((s.L - s.mu) * c.alpha_next - (s.A * s.mu + s.L)));
      worst = std::max(worst, std::abs(c.A_next - (s.A + c.alpha_next)));
      s.absorb(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
      s.advance();
    }
    return InvariantResult{"fgm_coefficients", worst < 1e-9, fmt("max residual %.3g", worst)};
  }));

  return out;
}

}  // namespace lpigrad
