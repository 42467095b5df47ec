#pragma once

#include "isospec/schedule.hpp"
#include "isospec/types.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>
#include <vector>

namespace isospec {

/// Spectral factorization M = vectors * diag(values) * vectors^T with values
/// sorted descending (stable with respect to the solver's output order).
template <typename Scalar>
struct SymEig {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;
};

template <typename Scalar>
SymEig<Scalar> sym_eig(const SymmetricMatrixT<Scalar>& m) {
  const Eigen::Index n = m.n();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.matrix());
  if (solver.info() != Eigen::Success) throw NumericalDegeneracy("symmetric eigensolver failed");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return ev(a) > ev(b); });

  SymEig<Scalar> out{Vector<Scalar>(n), Matrix<Scalar>(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = ev(order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <typename Scalar>
SymEig<Scalar> sym_eig(const Matrix<Scalar>& m) {
  return sym_eig(SymmetricMatrixT<Scalar>(m));
}

/// f(M) = W diag(f(lambda)) W^T.
template <typename Scalar, typename F>
Matrix<Scalar> spectral_apply(const SymEig<Scalar>& e, F&& f) {
  Vector<Scalar> fv = e.values.unaryExpr(f);
  return e.vectors * fv.asDiagonal() * e.vectors.transpose();
}

template <typename Scalar>
SymmetricMatrixT<Scalar> spd_log(const CovarianceT<Scalar>& s) {
  auto e = sym_eig(s.symmetric());
  if (!(e.values.minCoeff() > Scalar(0))) throw DomainError("log of a non-positive-definite matrix");
  return SymmetricMatrixT<Scalar>(spectral_apply(e, [](Scalar v) { return std::log(v); }));
}

template <typename Scalar>
CovarianceT<Scalar> sym_exp(const SymmetricMatrixT<Scalar>& a) {
  auto e = sym_eig(a);
  return CovarianceT<Scalar>(spectral_apply(e, [](Scalar v) { return std::exp(v); }));
}

template <typename Scalar>
CovarianceT<Scalar> spd_sqrt(const CovarianceT<Scalar>& s) {
  auto e = sym_eig(s.symmetric());
  if (!(e.values.minCoeff() > Scalar(0))) throw DomainError("sqrt of a non-positive-definite matrix");
  return CovarianceT<Scalar>(spectral_apply(e, [](Scalar v) { return std::sqrt(v); }));
}

template <typename Scalar>
CovarianceT<Scalar> spd_inv_sqrt(const CovarianceT<Scalar>& s) {
  auto e = sym_eig(s.symmetric());
  if (!(e.values.minCoeff() > Scalar(0))) throw DomainError("inverse sqrt of a non-positive-definite matrix");
  return CovarianceT<Scalar>(spectral_apply(e, [](Scalar v) { return Scalar(1) / std::sqrt(v); }));
}

/// Eigenvalues of log(S), descending.
template <typename Scalar>
Vector<Scalar> log_eigenvalues(const CovarianceT<Scalar>& s) {
  auto e = sym_eig(s.symmetric());
  if (!(e.values.minCoeff() > Scalar(0))) throw DomainError("covariance is not positive definite");
  return e.values.array().log().matrix();
}

/// The constant symmetric gain A with e^{TA} sigma0 e^{TA} = sigmaT.
SymmetricMatrix ot_generator(const Covariance& sigma0, const Covariance& sigmaT, double horizon);

/// Integral of tr(A_t^2) over a piecewise-constant schedule.
double shear_cost(const ControlSchedule& schedule);

/// Shifts the spectrum to zero trace and rescales the target so that
/// reachability is unchanged.
SteeringProblem trace_normalize(const SteeringProblem& problem);

/// Shift alpha = -tr(D)/n applied by trace_normalize (0 if already traceless).
double trace_shift(const Spectrum& spectrum);

}  // namespace isospec
