#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lpigrad/errors.hpp"
#include "lpigrad/grid.hpp"
#include "lpigrad/kernel.hpp"
#include "lpigrad/multi_index.hpp"

namespace lpigrad {

/// Interpolation weights w*_y(x) at one evaluation point, stored sparsely.
/// Grid indices are ascending; points outside the kernel support are absent.
template <typename Scalar = double>
struct WeightSet {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector point;
  std::vector<Eigen::Index> indices;
  Vector values;

  Eigen::Index support_count() const { return static_cast<Eigen::Index>(indices.size()); }
  Scalar sum() const { return values.sum(); }

  Scalar weight(Eigen::Index grid_index) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), grid_index);
    if (it == indices.end() || *it != grid_index) return Scalar(0);
    return values(it - indices.begin());
  }
};

namespace detail {

// Relative snap for grid points that land on the window edge up to rounding.
inline constexpr double kEdgeSnap = 1e-10;
inline constexpr double kPivotTolerance = 1e-12;

template <typename Scalar>
struct AxisWindow {
  Eigen::Index first = 0;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> offsets;  // (y_j - x_j) / h
  Eigen::Array<Scalar, Eigen::Dynamic, 1> kernel;
};

template <typename Scalar>
AxisWindow<Scalar> axis_window(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& axis, Scalar x,
                               Scalar h, Kernel kernel) {
  using std::abs;
  const Scalar lo = x - h * Scalar(1 + kEdgeSnap);
  const Scalar hi = x + h * Scalar(1 + kEdgeSnap);
  const Scalar* begin = axis.data();
  const Scalar* end = axis.data() + axis.size();
  const Scalar* first = std::lower_bound(begin, end, lo);
  const Scalar* last = std::upper_bound(first, end, hi);

  AxisWindow<Scalar> w;
  w.first = first - begin;
  const Eigen::Index count = last - first;
  w.offsets.resize(count);
  w.kernel.resize(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    Scalar u = (first[k] - x) / h;
    if (abs(u) > Scalar(1)) u = u > Scalar(0) ? Scalar(1) : Scalar(-1);
    w.offsets(k) = u;
    w.kernel(k) = kernel_eval(kernel, u);
  }
  return w;
}

/// Tensor window: per-axis windows plus their Cartesian product.
template <typename Scalar>
struct LocalWindow {
  std::vector<AxisWindow<Scalar>> axes;
  int resolution = 0;

  Eigen::Index count() const {
    Eigen::Index c = 1;
    for (const auto& a : axes) c *= a.offsets.size();
    return c;
  }

  // Calls f(flat grid index, offset vector u, kernel product) for every window point.
  template <typename F>
  void for_each(F&& f) const {
    const int d = static_cast<int>(axes.size());
    for (const auto& a : axes)
      if (a.offsets.size() == 0) return;
    std::vector<Eigen::Index> pos(d, 0);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u(d);
    while (true) {
      Eigen::Index flat = 0;
      Scalar k = Scalar(1);
      for (int j = 0; j < d; ++j) {
        flat = flat * resolution + axes[j].first + pos[j];
        u(j) = axes[j].offsets(pos[j]);
        k *= axes[j].kernel(pos[j]);
      }
      f(flat, u, k);
      int j = d - 1;
      while (j >= 0 && ++pos[j] == axes[j].offsets.size()) {
        pos[j] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }
};

template <typename Scalar, typename Derived>
LocalWindow<Scalar> local_window(const Eigen::MatrixBase<Derived>& x, const Grid<Scalar>& grid) {
  const auto& cfg = grid.config();
  LocalWindow<Scalar> w;
  w.resolution = cfg.resolution;
  w.axes.reserve(cfg.dim);
  for (int j = 0; j < cfg.dim; ++j)
    w.axes.push_back(axis_window<Scalar>(grid.axis(), Scalar(x(j)), Scalar(cfg.bandwidth), cfg.kernel));
  return w;
}

template <typename Scalar>
Scalar window_scale(const InterpolationConfig& cfg) {
  using std::pow;
  return Scalar(1) / pow(Scalar(cfg.resolution) * Scalar(cfg.bandwidth), Scalar(cfg.dim));
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> assemble_moment(
    const LocalWindow<Scalar>& window, const Grid<Scalar>& grid) {
  const auto& basis = grid.basis();
  const Eigen::Index dim = basis.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> b =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
  window.for_each([&](Eigen::Index, const auto& u, Scalar k) {
    if (k == Scalar(0)) return;
    const auto basis_u = basis_vector(u, basis);
    b.template selfadjointView<Eigen::Upper>().rankUpdate(basis_u, k);
  });
  b.template triangularView<Eigen::StrictlyLower>() = b.transpose();
  b *= window_scale<Scalar>(grid.config());
  b.diagonal().array() += Scalar(grid.config().ridge);
  return b;
}

template <typename Derived>
void check_domain(const Eigen::MatrixBase<Derived>& x, const InterpolationConfig& cfg) {
  if (x.size() != cfg.dim)
    throw DomainViolation("evaluation point has dimension " + std::to_string(x.size()) +
                          ", grid has " + std::to_string(cfg.dim));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double v = static_cast<double>(x(j));
    if (!cfg.contains(v))
      throw DomainViolation("evaluation point coordinate " + std::to_string(v) +
                            " outside [h, 1-h] with h = " + std::to_string(cfg.bandwidth));
  }
}

/// Solves B v = U(0) = e_1. Throws SingularMoment on a small pivot.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_level_row(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) {
  using std::abs;
  const Scalar norm = b.cwiseAbs().maxCoeff();
  Eigen::LDLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> ldlt(b);
  if (!(norm > Scalar(0)) || ldlt.info() != Eigen::Success ||
      ldlt.vectorD().cwiseAbs().minCoeff() <= Scalar(kPivotTolerance) * norm) {
    throw SingularMoment("moment matrix is singular (bandwidth too small for grid resolution?)");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e1 =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Unit(b.rows(), 0);
  return ldlt.solve(e1);
}

template <typename Scalar, typename Derived>
WeightSet<Scalar> weights_from_window(const Eigen::MatrixBase<Derived>& x,
                                      const LocalWindow<Scalar>& window,
                                      const Grid<Scalar>& grid) {
  const auto b = assemble_moment(window, grid);
  const auto v = solve_level_row(b);
  const Scalar scale = window_scale<Scalar>(grid.config());

  WeightSet<Scalar> ws;
  ws.point = x.template cast<Scalar>();
  ws.indices.reserve(window.count());
  std::vector<Scalar> values;
  values.reserve(window.count());
  window.for_each([&](Eigen::Index flat, const auto& u, Scalar k) {
    if (k == Scalar(0)) return;
    ws.indices.push_back(flat);
    values.push_back(scale * k * v.dot(basis_vector(u, grid.basis())));
  });
  ws.values = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  return ws;
}

}  // namespace detail

/// B(x) + ridge I; symmetric by construction.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> moment_matrix(
    const Eigen::MatrixBase<Derived>& x, const Grid<Scalar>& grid) {
  detail::check_domain(x, grid.config());
  return detail::assemble_moment(detail::local_window(x, grid), grid);
}

/// Level weights w*_y(x) = [w_y(x)]_1 of the local polynomial fit at x.
template <typename Scalar, typename Derived>
WeightSet<Scalar> interpolation_weights(const Eigen::MatrixBase<Derived>& x,
                                        const Grid<Scalar>& grid) {
  detail::check_domain(x, grid.config());
  return detail::weights_from_window(x, detail::local_window(x, grid), grid);
}

/// Weighted sum of grid values. `values` is indexed by flat grid index;
/// NaN marks a missing value.
template <typename Scalar, typename Derived>
Scalar interpolate(const Eigen::MatrixBase<Derived>& values, const WeightSet<Scalar>& ws) {
  using std::isnan;
  Scalar acc = Scalar(0);
  for (std::size_t k = 0; k < ws.indices.size(); ++k) {
    const Eigen::Index g = ws.indices[k];
    if (g >= values.size() || isnan(values(g)))
      throw MissingValue("no value for grid point " + std::to_string(g));
    acc += ws.values(static_cast<Eigen::Index>(k)) * Scalar(values(g));
  }
  return acc;
}

template <typename Scalar>
Scalar interpolate(const std::unordered_map<Eigen::Index, Scalar>& values,
                   const WeightSet<Scalar>& ws) {
  Scalar acc = Scalar(0);
  for (std::size_t k = 0; k < ws.indices.size(); ++k) {
    auto it = values.find(ws.indices[k]);
    if (it == values.end())
      throw MissingValue("no value for grid point " + std::to_string(ws.indices[k]));
    acc += ws.values(static_cast<Eigen::Index>(k)) * it->second;
  }
  return acc;
}

/// Weights for every column of `xs` (d x k). Windows whose offset pattern
/// matches an earlier one reuse its solved weights with shifted grid indices.
template <typename Scalar, typename Derived>
std::vector<WeightSet<Scalar>> batch_weights(const Eigen::MatrixBase<Derived>& xs,
                                             const Grid<Scalar>& grid) {
  struct Cached {
    std::vector<Eigen::Index> indices;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  };
  std::map<std::vector<std::int64_t>, Cached> cache;
  const double quantum = std::ldexp(1.0, 44);

  std::vector<WeightSet<Scalar>> out;
  out.reserve(static_cast<std::size_t>(xs.cols()));
  for (Eigen::Index c = 0; c < xs.cols(); ++c) {
    const auto x = xs.col(c);
    try {
      detail::check_domain(x, grid.config());
      const auto window = detail::local_window(x, grid);

      std::vector<std::int64_t> key;
      for (const auto& a : window.axes) {
        key.push_back(static_cast<std::int64_t>(a.offsets.size()));
        for (Eigen::Index k = 0; k < a.offsets.size(); ++k)
          key.push_back(std::llround(static_cast<double>(a.offsets(k)) * quantum));
      }

      // Flat index of the window's first point; window indices are offsets from it.
      Eigen::Index base = 0;
      for (const auto& a : window.axes) base = base * grid.resolution() + a.first;

      auto it = cache.find(key);
      if (it == cache.end()) {
        WeightSet<Scalar> ws = detail::weights_from_window(x, window, grid);
        Cached entry;
        entry.values = ws.values;
        entry.indices.reserve(ws.indices.size());
        for (auto g : ws.indices) entry.indices.push_back(g - base);
        cache.emplace(std::move(key), std::move(entry));
        out.push_back(std::move(ws));
      } else {
        WeightSet<Scalar> ws;
        ws.point = x.template cast<Scalar>();
        ws.values = it->second.values;
        ws.indices.reserve(it->second.indices.size());
        for (auto g : it->second.indices) ws.indices.push_back(g + base);
        out.push_back(std::move(ws));
      }
    } catch (const SingularMoment& e) {
      throw SingularMoment(std::string(e.what()) + " at evaluation point " + std::to_string(c), c);
    } catch (const DomainViolation& e) {
      throw DomainViolation(std::string(e.what()) + " (evaluation point " + std::to_string(c) + ")");
    }
  }
  return out;
}

}  // namespace lpigrad
