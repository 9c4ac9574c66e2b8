#pragma once

#include <cmath>

#include "lpigrad/errors.hpp"

namespace lpigrad {

/// Constants of the function class: L1-smooth and mu-strongly convex in the
/// parameter, (eta, L2)-Hoelder in the data.
struct SmoothnessConstants {
  double L1 = 1.0;
  double L2 = 0.0;
  double eta = 1.0;
  double mu = 1.0;

  double sigma() const { return L1 / mu; }
  /// Polynomial order l = ceil(eta) - 1.
  int order() const { return static_cast<int>(std::ceil(eta)) - 1; }

  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("smoothness: mu must be > 0");
    if (!(L1 >= mu)) throw ConfigError("smoothness: L1 must be >= mu");
    if (!(eta > 0.0)) throw ConfigError("smoothness: eta must be > 0");
  }
};

}  // namespace lpigrad
