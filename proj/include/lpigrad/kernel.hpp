#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "lpigrad/errors.hpp"

namespace lpigrad {

enum class Kernel { rectangular, epanechnikov };

template <typename Scalar>
Scalar kernel_eval(Kernel kind, Scalar u) {
  using std::abs;
  switch (kind) {
    case Kernel::rectangular:
      return abs(u) <= Scalar(1) ? Scalar(1) : Scalar(0);
    case Kernel::epanechnikov: {
      const Scalar v = Scalar(0.75) * (Scalar(1) - u * u);
      return v > Scalar(0) ? v : Scalar(0);
    }
  }
  return Scalar(0);
}

inline std::string to_string(Kernel k) {
  return k == Kernel::rectangular ? "rectangular" : "epanechnikov";
}

inline Kernel parse_kernel(std::string_view s) {
  if (s == "rectangular") return Kernel::rectangular;
  if (s == "epanechnikov") return Kernel::epanechnikov;
  throw ConfigError("unknown kernel '" + std::string(s) + "'");
}

}  // namespace lpigrad
