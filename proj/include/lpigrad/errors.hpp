#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>

namespace lpigrad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The (ridged) moment matrix could not be factorized to working tolerance.
/// Usually the bandwidth is too small for the grid resolution.
class SingularMoment : public Error {
 public:
  explicit SingularMoment(const std::string& what,
                          std::optional<Eigen::Index> point_index = std::nullopt)
      : Error(what), point_index_(point_index) {}

  std::optional<Eigen::Index> point_index() const { return point_index_; }

 private:
  std::optional<Eigen::Index> point_index_;
};

class MissingValue : public Error {
 public:
  using Error::Error;
};

class DomainViolation : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InnerStall : public Error {
 public:
  using Error::Error;
};

class DegenerateCurvature : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpigrad
