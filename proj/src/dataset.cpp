#include "lpigrad/dataset.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lpigrad/errors.hpp"

namespace lpigrad {

namespace {

std::uint64_t point_key(const Eigen::Ref<const Eigen::VectorXd>& p) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double v = p(j);
    h = hash_bytes(&v, sizeof v, h);
  }
  return h;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    out.push_back(cell.substr(start));
  }
  return out;
}

}  // namespace

std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t k = 0; k < size; ++k) {
    h ^= bytes[k];
    h *= 1099511628211ULL;
  }
  return h;
}

Dataset::Dataset(Eigen::MatrixXd points, std::optional<Eigen::VectorXd> labels, double margin)
    : points_(std::move(points)), labels_(std::move(labels)), margin_(margin) {
  if (!(margin_ > 0.0 && margin_ < 0.5)) throw DomainViolation("dataset: margin must lie in (0, 1/2)");
  if (points_.cols() < 1 || points_.rows() < 1) throw DomainViolation("dataset: needs n >= 1 and d >= 1");
  if (labels_ && labels_->size() != points_.cols())
    throw DomainViolation("dataset: label count does not match point count");
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    for (Eigen::Index j = 0; j < points_.rows(); ++j) {
      const double v = points_(j, i);
      if (!(v >= margin_ && v <= 1.0 - margin_))
        throw DomainViolation("dataset: point " + std::to_string(i) + " coordinate " +
                              std::to_string(v) + " outside [h', 1-h']");
    }
  }
  hash_ = hash_bytes(points_.data(), sizeof(double) * points_.size());
  if (labels_) hash_ = hash_bytes(labels_->data(), sizeof(double) * labels_->size(), hash_);
  lookup_.reserve(static_cast<std::size_t>(points_.cols()));
  for (Eigen::Index i = 0; i < points_.cols(); ++i) lookup_.emplace(point_key(points_.col(i)), i);
}

std::optional<Eigen::Index> Dataset::find(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != points_.rows()) return std::nullopt;
  auto it = lookup_.find(point_key(p));
  if (it == lookup_.end()) return std::nullopt;
  if (std::memcmp(points_.col(it->second).data(), p.data(), sizeof(double) * p.size()) != 0)
    return std::nullopt;
  return it->second;
}

Dataset load_dataset_csv(const std::filesystem::path& path, double margin) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header row");
  const auto header = split_csv(line);
  int dim = 0;
  bool labelled = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "x_" + std::to_string(c + 1)) {
      if (labelled) throw IoError(path.string() + ": feature column after label column");
      ++dim;
    } else if (header[c] == "label" && c + 1 == header.size()) {
      labelled = true;
    } else {
      throw IoError(path.string() + ": unexpected header column '" + header[c] + "'");
    }
  }
  if (dim == 0) throw IoError(path.string() + ": header names no x_1 column");

  std::vector<double> coords;
  std::vector<double> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    const std::size_t expected = dim + (labelled ? 1 : 0);
    if (cells.size() != expected)
      throw IoError(path.string() + ": row " + std::to_string(line_no) + " has " +
                    std::to_string(cells.size()) + " columns, expected " + std::to_string(expected));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (cells[c].empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw IoError(path.string() + ": row " + std::to_string(line_no) + ": bad number '" +
                      cells[c] + "'");
      if (static_cast<int>(c) < dim) {
        if (!(v >= margin && v <= 1.0 - margin))
          throw DomainViolation(path.string() + ": row " + std::to_string(line_no) +
                                ": coordinate " + cells[c] + " outside [h', 1-h']");
        coords.push_back(v);
      } else {
        labels.push_back(v);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(coords.size() / dim);
  if (n == 0) throw IoError(path.string() + ": no data rows");
  Eigen::MatrixXd points = Eigen::Map<Eigen::MatrixXd>(coords.data(), dim, n);
  std::optional<Eigen::VectorXd> lab;
  if (labelled) lab = Eigen::Map<Eigen::VectorXd>(labels.data(), n);
  return Dataset(std::move(points), std::move(lab), margin);
}

void save_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot write dataset " + path.string());
  for (int j = 0; j < ds.dim(); ++j) std::fprintf(f, j == 0 ? "x_%d" : ",x_%d", j + 1);
  if (ds.has_labels()) std::fputs(",label", f);
  std::fputc('\n', f);
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (int j = 0; j < ds.dim(); ++j) std::fprintf(f, j == 0 ? "%.17g" : ",%.17g", ds.points()(j, i));
    if (ds.has_labels()) std::fprintf(f, ",%.17g", ds.label(i));
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw IoError("error writing dataset " + path.string());
}

}  // namespace lpigrad
