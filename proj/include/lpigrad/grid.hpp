#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "lpigrad/errors.hpp"
#include "lpigrad/kernel.hpp"
#include "lpigrad/multi_index.hpp"

namespace lpigrad {

enum class GridConvention {
  upper,       // j/m, j = 1..m
  cellcenter,  // (j - 1/2)/m, j = 1..m
};

inline std::string to_string(GridConvention c) {
  return c == GridConvention::upper ? "upper" : "cellcenter";
}

inline GridConvention parse_grid_convention(std::string_view s) {
  if (s == "upper") return GridConvention::upper;
  if (s == "cellcenter") return GridConvention::cellcenter;
  throw ConfigError("unknown grid convention '" + std::string(s) + "'");
}

struct InterpolationConfig {
  int dim = 1;
  int resolution = 100;  // m, grid points per axis
  double bandwidth = 0.01;
  int order = 1;  // l
  Kernel kernel = Kernel::rectangular;
  double ridge = 0.0;
  GridConvention convention = GridConvention::upper;

  /// Grid points inside one kernel window along an axis, at least.
  double window_points() const { return 2.0 * resolution * bandwidth; }

  void validate() const {
    if (dim < 1) throw ConfigError("interpolation: dim must be >= 1");
    if (resolution < 1) throw ConfigError("interpolation: resolution must be >= 1");
    if (!(bandwidth > 0.0 && bandwidth < 0.5))
      throw ConfigError("interpolation: bandwidth must lie in (0, 1/2)");
    if (order < 0) throw ConfigError("interpolation: order must be >= 0");
    if (!(ridge >= 0.0)) throw ConfigError("interpolation: ridge must be >= 0");
    // Every window [x-h, x+h] must hold l+1 grid points per axis.
    if (window_points() + 1e-9 < order + 1)
      throw ConfigError("interpolation: 2*m*h = " + std::to_string(window_points()) +
                        " < l+1 = " + std::to_string(order + 1) +
                        "; kernel windows cannot support the polynomial order");
  }

  bool contains(double x) const { return x >= bandwidth - 1e-12 && x <= 1.0 - bandwidth + 1e-12; }
};

/// Uniform tensor grid G_m on [0,1]^d, m^d points, row-major (last axis fastest).
template <typename Scalar = double>
class Grid {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  explicit Grid(const InterpolationConfig& config)
      : config_(config), basis_(config.dim, config.order) {
    config_.validate();
    const int m = config_.resolution;
    axis_.resize(m);
    for (int j = 1; j <= m; ++j) {
      axis_(j - 1) = config_.convention == GridConvention::upper
                         ? Scalar(j) / Scalar(m)
                         : (Scalar(j) - Scalar(0.5)) / Scalar(m);
    }
    size_ = 1;
    for (int k = 0; k < config_.dim; ++k) {
      if (size_ > std::numeric_limits<Eigen::Index>::max() / m)
        throw Overflow("grid: m^d overflows the index type");
      size_ *= m;
    }
  }

  const InterpolationConfig& config() const { return config_; }
  const MultiIndexSet& basis() const { return basis_; }
  int dim() const { return config_.dim; }
  int resolution() const { return config_.resolution; }
  Eigen::Index size() const { return size_; }

  /// Per-axis coordinates (identical on every axis).
  const Array& axis() const { return axis_; }

  Vector point(Eigen::Index flat) const {
    Vector p(config_.dim);
    for (int j = config_.dim - 1; j >= 0; --j) {
      p(j) = axis_(flat % config_.resolution);
      flat /= config_.resolution;
    }
    return p;
  }

  /// d x m^d matrix, one column per grid point.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> points() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(config_.dim, size_);
    for (Eigen::Index k = 0; k < size_; ++k) out.col(k) = point(k);
    return out;
  }

 private:
  InterpolationConfig config_;
  MultiIndexSet basis_;
  Array axis_;
  Eigen::Index size_ = 0;
};

template <typename Scalar = double>
Grid<Scalar> grid_points(const InterpolationConfig& config) {
  return Grid<Scalar>(config);
}

}  // namespace lpigrad
