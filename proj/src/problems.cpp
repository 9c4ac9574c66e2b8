#include "lpigrad/problems.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <json.hpp>

#include "lpigrad/errors.hpp"

namespace lpigrad {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_unit_domain(const Eigen::Ref<const Eigen::VectorXd>& point) {
  for (Eigen::Index j = 0; j < point.size(); ++j) {
    if (!(point(j) >= 0.0 && point(j) <= 1.0))
      throw DomainViolation("sample gradient queried outside [0,1]^d at " + std::to_string(point(j)));
  }
}

}  // namespace

double ErmProblem::objective(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  const Dataset& ds = dataset();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ds.size(); ++i) acc += loss(ds.point(i), theta);
  return acc / static_cast<double>(ds.size());
}

std::string to_string(LabelRule r) {
  return r == LabelRule::noiseless_model ? "noiseless_model" : "noisy_model";
}

LabelRule parse_label_rule(const std::string& s) {
  if (s == "noiseless_model") return LabelRule::noiseless_model;
  if (s == "noisy_model") return LabelRule::noisy_model;
  throw ConfigError("unknown label rule '" + s + "'");
}

// ---------------------------------------------------------------------------

LinearRegressionProblem::LinearRegressionProblem(Dataset ds, double w_init, double noise_std,
                                                 std::uint64_t seed, LabelRule rule)
    : ds_(std::move(ds)), w_init_(w_init), noise_std_(noise_std), seed_(seed), rule_(rule) {
  if (ds_.dim() != 1) throw ConfigError("linear regression problem is one-dimensional");
  if (!ds_.has_labels()) throw ConfigError("linear regression problem needs labels");
}

double LinearRegressionProblem::label_at(double x) const {
  const Eigen::Matrix<double, 1, 1> p(x);
  if (auto i = ds_.find(p)) return ds_.label(*i);
  double y = w_init_ * x;
  if (rule_ == LabelRule::noisy_model && noise_std_ > 0.0) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    std::mt19937_64 rng(splitmix64(seed_ ^ splitmix64(bits)));
    std::normal_distribution<double> noise(0.0, noise_std_);
    y += noise(rng);
  }
  return y;
}

void LinearRegressionProblem::gradient(const Eigen::Ref<const Eigen::VectorXd>& point,
                                       const Eigen::Ref<const Eigen::VectorXd>& theta,
                                       Eigen::Ref<Eigen::VectorXd> out) const {
  check_unit_domain(point);
  const double x = point(0);
  out(0) = 2.0 * x * (theta(0) * x - label_at(x));
}

double LinearRegressionProblem::loss(const Eigen::Ref<const Eigen::VectorXd>& point,
                                     const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  check_unit_domain(point);
  const double x = point(0);
  const double r = theta(0) * x - label_at(x);
  return r * r;
}

double LinearRegressionProblem::objective(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  const auto x = ds_.points().row(0).transpose();
  return ((theta(0) * x - ds_.labels()).squaredNorm()) / static_cast<double>(ds_.size());
}

std::optional<Optimum> LinearRegressionProblem::optimum() const {
  const auto x = ds_.points().row(0).transpose();
  const double sxx = x.squaredNorm();
  if (!(sxx > 0.0)) return std::nullopt;
  Optimum opt;
  opt.theta = Eigen::VectorXd::Constant(1, x.dot(ds_.labels()) / sxx);
  opt.objective = objective(opt.theta);
  return opt;
}

SmoothnessConstants LinearRegressionProblem::smoothness() const {
  const auto x = ds_.points().row(0).transpose().array();
  SmoothnessConstants c;
  c.L1 = 2.0 * x.square().maxCoeff();
  c.mu = 2.0 * x.square().mean();
  c.eta = eta;

  // Second differences of the noiseless data-space gradient 2x(wx - w_init x)
  // over x-probes and parameters in [-1, 2].
  const int probes = 64;
  const double step = 1e-3;
  double l2 = 0.0;
  for (double w : {-1.0, 0.0, 1.0, 2.0}) {
    for (int k = 0; k < probes; ++k) {
      const double xp = step + (1.0 - 2.0 * step) * k / (probes - 1);
      auto g = [&](double t) { return 2.0 * t * (w * t - w_init_ * t); };
      const double second = (g(xp + step) - 2.0 * g(xp) + g(xp - step)) / (step * step);
      l2 = std::max(l2, std::abs(second));
    }
  }
  c.L2 = l2;
  return c;
}

LinearRegressionProblem generate_linear_regression(Eigen::Index n, double margin, double noise_std,
                                                   std::uint64_t seed, LabelRule rule) {
  if (n < 1) throw ConfigError("generate_linear_regression: n must be >= 1");
  if (!(margin > 0.0 && margin < 0.5)) throw ConfigError("generate_linear_regression: margin must lie in (0, 1/2)");
  if (!(noise_std >= 0.0)) throw ConfigError("generate_linear_regression: noise_std must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double w_init = unit(rng);
  while (w_init == 0.0) w_init = unit(rng);

  std::uniform_real_distribution<double> feature(margin, 1.0 - margin);
  Eigen::MatrixXd points(1, n);
  for (Eigen::Index i = 0; i < n; ++i) points(0, i) = feature(rng);

  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i)
    labels(i) = w_init * points(0, i) + (noise_std > 0.0 ? noise(rng) : 0.0);

  return LinearRegressionProblem(Dataset(std::move(points), std::move(labels), margin), w_init,
                                 noise_std, seed, rule);
}

void save_problem(const LinearRegressionProblem& prob, const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto sidecar = stem;
  sidecar += ".json";
  save_dataset_csv(prob.dataset(), csv);
  nlohmann::json j = {{"w_init", prob.w_init()},
                      {"noise_std", prob.noise_std()},
                      {"seed", prob.seed()},
                      {"label_rule", to_string(prob.label_rule())},
                      {"margin", prob.dataset().margin()}};
  std::ofstream out(sidecar);
  if (!out) throw IoError("cannot write " + sidecar.string());
  out << j.dump(2) << '\n';
}

LinearRegressionProblem load_problem(const std::filesystem::path& stem) {
  auto csv = stem;
  csv += ".csv";
  auto sidecar = stem;
  sidecar += ".json";
  std::ifstream in(sidecar);
  if (!in) throw IoError("cannot open " + sidecar.string());
  nlohmann::json j;
  try {
    in >> j;
    const double margin = j.at("margin").get<double>();
    return LinearRegressionProblem(load_dataset_csv(csv, margin), j.at("w_init").get<double>(),
                                   j.at("noise_std").get<double>(), j.at("seed").get<std::uint64_t>(),
                                   parse_label_rule(j.at("label_rule").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(sidecar.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

PolyGradientProblem::PolyGradientProblem(Dataset ds, int degree, Eigen::MatrixXd coefficients,
                                         double curvature)
    : ds_(std::move(ds)),
      monomials_(ds_.dim(), degree),
      coefficients_(std::move(coefficients)),
      curvature_(curvature) {
  if (coefficients_.cols() != monomials_.size())
    throw ConfigError("poly gradient problem: coefficient table has the wrong number of monomials");
  if (!(curvature_ > 0.0)) throw ConfigError("poly gradient problem: curvature must be > 0");
}

Eigen::VectorXd PolyGradientProblem::polynomial(const Eigen::Ref<const Eigen::VectorXd>& point) const {
  Eigen::VectorXd mono(monomials_.size());
  for (Eigen::Index k = 0; k < monomials_.size(); ++k) {
    double v = 1.0;
    for (int j = 0; j < monomials_.dim(); ++j) v *= std::pow(point(j), monomials_.indices()(j, k));
    mono(k) = v;
  }
  return coefficients_ * mono;
}

void PolyGradientProblem::gradient(const Eigen::Ref<const Eigen::VectorXd>& point,
                                   const Eigen::Ref<const Eigen::VectorXd>& theta,
                                   Eigen::Ref<Eigen::VectorXd> out) const {
  check_unit_domain(point);
  out = curvature_ * theta - polynomial(point);
}

double PolyGradientProblem::loss(const Eigen::Ref<const Eigen::VectorXd>& point,
                                 const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  check_unit_domain(point);
  return 0.5 * curvature_ * theta.squaredNorm() - theta.dot(polynomial(point));
}

std::optional<Optimum> PolyGradientProblem::optimum() const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(param_dim());
  for (Eigen::Index i = 0; i < ds_.size(); ++i) mean += polynomial(ds_.point(i));
  mean /= static_cast<double>(ds_.size());
  Optimum opt;
  opt.theta = mean / curvature_;
  opt.objective = objective(opt.theta);
  return opt;
}

SmoothnessConstants PolyGradientProblem::smoothness() const {
  SmoothnessConstants c;
  c.L1 = curvature_;
  c.mu = curvature_;
  c.eta = monomials_.order() + 1.0;
  c.L2 = 0.0;
  return c;
}

PolyGradientProblem make_poly_gradient_problem(int dim, int params, int degree, Eigen::Index n,
                                               double margin, std::uint64_t seed, double curvature) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> feature(margin, 1.0 - margin);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Eigen::MatrixXd points(dim, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) points(j, i) = feature(rng);
  const MultiIndexSet mono(dim, degree);
  Eigen::MatrixXd c(params, mono.size());
  for (Eigen::Index r = 0; r < c.rows(); ++r)
    for (Eigen::Index k = 0; k < c.cols(); ++k) c(r, k) = coef(rng);
  return PolyGradientProblem(Dataset(std::move(points), std::nullopt, margin), degree, std::move(c),
                             curvature);
}

}  // namespace lpigrad
