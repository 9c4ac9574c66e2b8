#pragma once

#include <Eigen/Core>

#include <cassert>
#include <vector>

namespace lpigrad {

/// All multi-indices s in Z_+^d with |s| <= l, graded lexicographic.
/// Column k of indices() is the k-th multi-index; column 0 is all zeros.
class MultiIndexSet {
 public:
  MultiIndexSet(int dim, int order) : dim_(dim), order_(order) {
    assert(dim >= 1 && order >= 0);
    std::vector<int> current(dim, 0);
    std::vector<std::vector<int>> found;
    for (int degree = 0; degree <= order; ++degree) {
      fill(0, degree, current, found);
    }
    indices_.resize(dim, static_cast<Eigen::Index>(found.size()));
    inverse_factorial_.resize(indices_.cols());
    for (Eigen::Index k = 0; k < indices_.cols(); ++k) {
      double fact = 1.0;
      for (int j = 0; j < dim; ++j) {
        indices_(j, k) = found[k][j];
        for (int f = 2; f <= found[k][j]; ++f) fact *= f;
      }
      inverse_factorial_(k) = 1.0 / fact;
    }
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  Eigen::Index size() const { return indices_.cols(); }

  const Eigen::MatrixXi& indices() const { return indices_; }
  auto operator[](Eigen::Index k) const { return indices_.col(k); }

  int total_degree(Eigen::Index k) const { return indices_.col(k).sum(); }

  /// 1 / s! for the k-th multi-index.
  double inverse_factorial(Eigen::Index k) const { return inverse_factorial_(k); }

 private:
  // Distribute `remaining` over axes [axis, dim), largest share first.
  void fill(int axis, int remaining, std::vector<int>& current,
            std::vector<std::vector<int>>& out) const {
    if (axis == dim_ - 1) {
      current[axis] = remaining;
      out.push_back(current);
      return;
    }
    for (int s = remaining; s >= 0; --s) {
      current[axis] = s;
      fill(axis + 1, remaining - s, current, out);
    }
  }

  int dim_;
  int order_;
  Eigen::MatrixXi indices_;
  Eigen::VectorXd inverse_factorial_;
};

inline MultiIndexSet enumerate_multi_indices(int dim, int order) {
  return MultiIndexSet(dim, order);
}

/// U(u) = [u^s / s! : |s| <= l]. First entry is always 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> basis_vector(
    const Eigen::MatrixBase<Derived>& u, const MultiIndexSet& idx) {
  using Scalar = typename Derived::Scalar;
  const int d = idx.dim();
  const int l = idx.order();
  assert(u.size() == d);

  // powers(e, j) = u_j^e
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> powers(l + 1, d);
  for (int j = 0; j < d; ++j) {
    powers(0, j) = Scalar(1);
    for (int e = 1; e <= l; ++e) powers(e, j) = powers(e - 1, j) * u(j);
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(idx.size());
  for (Eigen::Index k = 0; k < idx.size(); ++k) {
    Scalar v = Scalar(idx.inverse_factorial(k));
    for (int j = 0; j < d; ++j) v *= powers(idx.indices()(j, k), j);
    out(k) = v;
  }
  return out;
}

}  // namespace lpigrad
