#pragma once

#include "isospec/types.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <map>
#include <string>
#include <vector>

namespace isospec {

/// Lexicographically ordered strictly increasing k-tuples drawn from
/// {0, ..., n-1}. Labels are reported 1-based.
class MultiIndexBasis {
 public:
  using Tuple = std::vector<int>;

  MultiIndexBasis(int n, int k) : n_(n), k_(k) {
    if (k < 1 || k > n) throw InvalidInput("k_subsets: k must lie in [1, n]");
    Tuple t(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) t[static_cast<std::size_t>(i)] = i;
    while (true) {
      tuples_.push_back(t);
      int pos = k - 1;
      while (pos >= 0 && t[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
      if (pos < 0) break;
      ++t[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < k; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] + 1;
    }
    for (std::size_t i = 0; i < tuples_.size(); ++i) position_[tuples_[i]] = static_cast<Eigen::Index>(i);
  }

  int n() const { return n_; }
  int k() const { return k_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(tuples_.size()); }
  const Tuple& operator[](Eigen::Index i) const { return tuples_[static_cast<std::size_t>(i)]; }
  const std::vector<Tuple>& tuples() const { return tuples_; }

  Eigen::Index index_of(const Tuple& t) const {
    auto it = position_.find(t);
    if (it == position_.end()) throw InvalidInput("multi-index not in basis");
    return it->second;
  }

  std::string label(Eigen::Index i) const {
    std::string s = "(";
    const auto& t = (*this)[i];
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j) s += ",";
      s += std::to_string(t[j] + 1);
    }
    return s + ")";
  }

 private:
  int n_;
  int k_;
  std::vector<Tuple> tuples_;
  std::map<Tuple, Eigen::Index> position_;
};

inline MultiIndexBasis k_subsets(int n, int k) { return MultiIndexBasis(n, k); }

template <typename Scalar>
struct CompoundMatrixT {
  MultiIndexBasis basis;
  Matrix<Scalar> entries;

  Scalar at(const MultiIndexBasis::Tuple& row, const MultiIndexBasis::Tuple& col) const {
    return entries(basis.index_of(row), basis.index_of(col));
  }
};

using CompoundMatrix = CompoundMatrixT<double>;

namespace detail {

template <typename Scalar>
Scalar small_determinant(const Matrix<Scalar>& m) {
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.partialPivLu().determinant();
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& x, int k) {
  if (x.rows() != x.cols()) throw InvalidInput("compound: matrix must be square");
  if (k < 1 || k > x.rows()) throw InvalidInput("compound: k must lie in [1, n]");
}

}  // namespace detail

/// k-th multiplicative compound: entry (I, J) is the minor on rows I, columns J.
template <typename Derived>
CompoundMatrixT<typename Derived::Scalar> multiplicative_compound(const Eigen::MatrixBase<Derived>& x, int k) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(x, k);
  MultiIndexBasis basis(static_cast<int>(x.rows()), k);
  const Eigen::Index m = basis.size();
  Matrix<Scalar> out(m, m);
  Matrix<Scalar> sub(k, k);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& rows = basis[r];
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto& cols = basis[c];
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = x(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
      out(r, c) = detail::small_determinant(sub);
    }
  }
  return {std::move(basis), std::move(out)};
}

/// k-th additive compound, the generator of the multiplicative compound of e^{tA}.
template <typename Derived>
CompoundMatrixT<typename Derived::Scalar> additive_compound(const Eigen::MatrixBase<Derived>& a, int k) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(a, k);
  MultiIndexBasis basis(static_cast<int>(a.rows()), k);
  const Eigen::Index m = basis.size();
  Matrix<Scalar> out = Matrix<Scalar>::Zero(m, m);

  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& in = basis[r];
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto& jn = basis[c];
      if (r == c) {
        Scalar s(0);
        for (int i : in) s += a(i, i);
        out(r, c) = s;
        continue;
      }
      // Positions (1-based) of the single element of I missing from J and vice versa.
      int diff = 0, pos_r = 0, pos_s = 0;
      for (int p = 0; p < k; ++p) {
        if (std::find(jn.begin(), jn.end(), in[static_cast<std::size_t>(p)]) == jn.end()) {
          ++diff;
          pos_r = p + 1;
        }
        if (std::find(in.begin(), in.end(), jn[static_cast<std::size_t>(p)]) == in.end()) pos_s = p + 1;
      }
      if (diff != 1) continue;
      const Scalar sign = ((pos_r + pos_s) % 2 == 0) ? Scalar(1) : Scalar(-1);
      out(r, c) = sign * a(in[static_cast<std::size_t>(pos_r - 1)], jn[static_cast<std::size_t>(pos_s - 1)]);
    }
  }
  return {std::move(basis), std::move(out)};
}

/// Product of the k largest singular values, i.e. the operator norm of the
/// k-th multiplicative compound.
template <typename Derived>
typename Derived::Scalar compound_top_singular_value(const Eigen::MatrixBase<Derived>& x, int k) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(x, k);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(x.eval());
  const auto& sv = svd.singularValues();  // descending
  Scalar p(1);
  for (int i = 0; i < k; ++i) p *= sv(i);
  return p;
}

}  // namespace isospec
