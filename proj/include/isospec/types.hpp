#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace isospec {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PreconditionFailed : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Divergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Numerical thresholds shared by the certification and synthesis layers.
/// Every field can be overridden from the command line by name.
struct Tolerances {
  double symmetry = 1e-12;      // relative asymmetry accepted before symmetrizing
  double majorization = 1e-9;   // prefix-sum slack, scaled by 1 + max |entry|
  double isotropic = 1e-9;      // ||S - (tr S / n) I||_F <= isotropic * tr S
  double isospectral = 1e-9;    // generator eigenvalues vs. prescribed spectrum
  double determinant = 1e-9;    // relative determinant agreement
  double support = 1e-12;       // Birkhoff support threshold and weight cutoff
  double time = 1e-12;          // slack on phase durations vs. horizon
};

template <typename Derived>
typename Derived::Scalar max_abs_entry(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar asymmetry(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Real symmetric matrix. Construction symmetrizes inputs whose asymmetry is
/// within `rel_tol * (1 + max |entry|)` and rejects anything worse.
template <typename Scalar>
class SymmetricMatrixT {
 public:
  SymmetricMatrixT() = default;

  explicit SymmetricMatrixT(const Matrix<Scalar>& m, Scalar rel_tol = Scalar(1e-12)) {
    if (m.rows() != m.cols()) throw InvalidInput("symmetric matrix must be square");
    if (!m.allFinite()) throw InvalidInput("matrix has non-finite entries");
    if (asymmetry(m) > rel_tol * (Scalar(1) + max_abs_entry(m)))
      throw InvalidInput("matrix is not symmetric within tolerance");
    m_ = (m + m.transpose()) / Scalar(2);
  }

  static SymmetricMatrixT zero(Eigen::Index n) { return SymmetricMatrixT(Matrix<Scalar>::Zero(n, n)); }
  static SymmetricMatrixT identity(Eigen::Index n) {
    return SymmetricMatrixT(Matrix<Scalar>::Identity(n, n));
  }
  static SymmetricMatrixT diagonal(const Vector<Scalar>& d) {
    return SymmetricMatrixT(Matrix<Scalar>(d.asDiagonal()));
  }

  const Matrix<Scalar>& matrix() const { return m_; }
  Eigen::Index n() const { return m_.rows(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymmetricMatrixT operator-() const { return SymmetricMatrixT(Matrix<Scalar>(-m_)); }
  friend SymmetricMatrixT operator*(Scalar s, const SymmetricMatrixT& a) {
    return SymmetricMatrixT(Matrix<Scalar>(s * a.m_));
  }
  friend SymmetricMatrixT operator+(const SymmetricMatrixT& a, const SymmetricMatrixT& b) {
    return SymmetricMatrixT(Matrix<Scalar>(a.m_ + b.m_));
  }
  friend SymmetricMatrixT operator-(const SymmetricMatrixT& a, const SymmetricMatrixT& b) {
    return SymmetricMatrixT(Matrix<Scalar>(a.m_ - b.m_));
  }

 private:
  Matrix<Scalar> m_;
};

/// Symmetric positive-definite matrix (a state covariance).
template <typename Scalar>
class CovarianceT {
 public:
  CovarianceT() = default;

  explicit CovarianceT(const Matrix<Scalar>& m, Scalar rel_tol = Scalar(1e-12))
      : CovarianceT(SymmetricMatrixT<Scalar>(m, rel_tol)) {}

  explicit CovarianceT(SymmetricMatrixT<Scalar> s) : s_(std::move(s)) {
    if (s_.n() == 0) throw InvalidInput("covariance must have positive dimension");
    Eigen::LLT<Matrix<Scalar>> llt(s_.matrix());
    if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  }

  static CovarianceT identity(Eigen::Index n) { return CovarianceT(Matrix<Scalar>::Identity(n, n)); }
  static CovarianceT diagonal(const Vector<Scalar>& d) {
    return CovarianceT(Matrix<Scalar>(d.asDiagonal()));
  }

  const Matrix<Scalar>& matrix() const { return s_.matrix(); }
  const SymmetricMatrixT<Scalar>& symmetric() const { return s_; }
  Eigen::Index n() const { return s_.n(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return s_(i, j); }

  friend CovarianceT operator*(Scalar s, const CovarianceT& c) {
    if (!(s > Scalar(0))) throw DomainError("covariance scale must be positive");
    return CovarianceT(Matrix<Scalar>(s * c.matrix()));
  }

 private:
  SymmetricMatrixT<Scalar> s_;
};

/// Prescribed gain eigenvalues, kept sorted in descending order.
template <typename Scalar>
class SpectrumT {
 public:
  SpectrumT() = default;

  explicit SpectrumT(std::vector<Scalar> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidInput("spectrum must be non-empty");
    for (Scalar v : values_)
      if (!std::isfinite(static_cast<double>(v))) throw InvalidInput("spectrum has non-finite entries");
    std::stable_sort(values_.begin(), values_.end(), std::greater<Scalar>());
  }

  explicit SpectrumT(const Vector<Scalar>& v) : SpectrumT(std::vector<Scalar>(v.data(), v.data() + v.size())) {}

  const std::vector<Scalar>& values() const { return values_; }
  Eigen::Index n() const { return static_cast<Eigen::Index>(values_.size()); }
  Scalar operator[](std::size_t i) const { return values_[i]; }

  Vector<Scalar> vector() const {
    return Eigen::Map<const Vector<Scalar>>(values_.data(), static_cast<Eigen::Index>(values_.size()));
  }

  Scalar trace() const { return std::accumulate(values_.begin(), values_.end(), Scalar(0)); }

  Scalar top_sum(std::size_t k) const {
    return std::accumulate(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(k), Scalar(0));
  }

  bool traceless() const {
    Scalar scale = Scalar(1);
    for (Scalar v : values_) scale = std::max(scale, Scalar(1) + std::abs(v));
    return std::abs(trace()) <= Scalar(1e-12) * scale;
  }

  /// Zero up to round-off, so that a shifted scalar spectrum counts as zero.
  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](Scalar v) { return std::abs(v) <= Scalar(1e-12); });
  }

  /// Spectrum of -D, re-sorted descending.
  SpectrumT negated() const {
    std::vector<Scalar> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](Scalar v) { return -v; });
    return SpectrumT(std::move(out));
  }

  SpectrumT shifted(Scalar alpha) const {
    std::vector<Scalar> out(values_);
    for (auto& v : out) v += alpha;
    return SpectrumT(std::move(out));
  }

  Scalar sum_of_squares() const {
    return std::accumulate(values_.begin(), values_.end(), Scalar(0),
                           [](Scalar acc, Scalar v) { return acc + v * v; });
  }

 private:
  std::vector<Scalar> values_;
};

using SymmetricMatrix = SymmetricMatrixT<double>;
using Covariance = CovarianceT<double>;
using Spectrum = SpectrumT<double>;

/// Steer `sigma0` to `sigmaT` over `horizon` with gains isospectral to `spectrum`.
struct SteeringProblem {
  Covariance sigma0;
  Covariance sigmaT;
  Spectrum spectrum;
  double horizon = 0.0;

  SteeringProblem() = default;
  SteeringProblem(Covariance s0, Covariance sT, Spectrum d, double T)
      : sigma0(std::move(s0)), sigmaT(std::move(sT)), spectrum(std::move(d)), horizon(T) {
    if (sigma0.n() != sigmaT.n() || sigma0.n() != spectrum.n())
      throw InvalidInput("problem dimensions disagree");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("horizon must be positive");
  }

  Eigen::Index n() const { return sigma0.n(); }
};

}  // namespace isospec
