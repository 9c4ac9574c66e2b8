#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>

namespace lpigrad {

/// n data points in [h', 1-h']^d (stored d x n, one column per point) with
/// optional scalar labels.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd points, std::optional<Eigen::VectorXd> labels, double margin);

  Eigen::Index size() const { return points_.cols(); }
  int dim() const { return static_cast<int>(points_.rows()); }
  double margin() const { return margin_; }

  const Eigen::MatrixXd& points() const { return points_; }
  auto point(Eigen::Index i) const { return points_.col(i); }

  bool has_labels() const { return labels_.has_value(); }
  const Eigen::VectorXd& labels() const { return *labels_; }
  double label(Eigen::Index i) const { return (*labels_)(i); }

  /// FNV-1a digest of points and labels; used as the weight-cache key.
  std::uint64_t hash() const { return hash_; }

  /// Index of a stored point bitwise equal to `p`, if any.
  std::optional<Eigen::Index> find(const Eigen::Ref<const Eigen::VectorXd>& p) const;

 private:
  Eigen::MatrixXd points_;
  std::optional<Eigen::VectorXd> labels_;
  double margin_;
  std::uint64_t hash_ = 0;
  std::unordered_map<std::uint64_t, Eigen::Index> lookup_;
};

std::uint64_t hash_bytes(const void* data, std::size_t size,
                         std::uint64_t seed = 1469598103934665603ULL);

/// Reads `x_1,...,x_d[,label]` with a header row. Every coordinate must lie in
/// [margin, 1-margin]; the error names the first offending line.
Dataset load_dataset_csv(const std::filesystem::path& path, double margin);

void save_dataset_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace lpigrad
