#pragma once

// Random instances for property tests. Everything draws from an explicitly
// seeded engine so failures reproduce.

#include "isospec/majorization.hpp"
#include "isospec/matrix_calculus.hpp"
#include "isospec/reachability.hpp"
#include "isospec/schedule.hpp"
#include "isospec/types.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace isospec::testing {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed = 20240611) { return Rng(seed); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, n, n));
  Eigen::MatrixXd q = qr.householderQ();
  // fix column signs so the distribution is Haar
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

inline SymmetricMatrix random_symmetric(Rng& rng, Eigen::Index n, double scale = 1.0) {
  const Eigen::MatrixXd g = gaussian(rng, n, n);
  return SymmetricMatrix(Eigen::MatrixXd(scale * (g + g.transpose()) / 2.0));
}

/// Q diag(e^{u_i}) Q^T with u_i uniform in [-spread, spread].
inline Covariance random_spd(Rng& rng, Eigen::Index n, double spread = 1.0) {
  Eigen::VectorXd lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::exp(uniform(rng, -spread, spread));
  const Eigen::MatrixXd q = random_orthogonal(rng, n);
  return Covariance(Eigen::MatrixXd(q * lam.asDiagonal() * q.transpose()));
}

inline Covariance with_unit_determinant(const Covariance& s) {
  const double logdet = log_eigenvalues(s).sum();
  return std::exp(-logdet / static_cast<double>(s.n())) * s;
}

inline Spectrum random_spectrum(Rng& rng, Eigen::Index n, bool traceless, double scale = 2.0) {
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(rng, -scale, scale);
  if (traceless) d.array() -= d.mean();
  return Spectrum(d);
}

inline Permutation random_permutation(Rng& rng, int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Convex mixture of `terms` random permutation matrices.
inline Eigen::MatrixXd random_doubly_stochastic(Rng& rng, int n, int terms) {
  Eigen::VectorXd w(terms);
  for (int i = 0; i < terms; ++i) w(i) = uniform(rng, 0.05, 1.0);
  w /= w.sum();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < terms; ++i) p += w(i) * permutation_matrix(random_permutation(rng, n));
  return p;
}

/// Segment generators W diag(perm(D)) W^T with random W and permutation.
inline ControlSchedule random_isospectral_schedule(Rng& rng, const Spectrum& d, int segments, double max_duration) {
  ControlSchedule s;
  s.spectrum = d;
  const auto n = d.n();
  for (int i = 0; i < segments; ++i) {
    const Eigen::MatrixXd w = random_orthogonal(rng, n);
    const Eigen::VectorXd rates = permute_spectrum(d.values(), random_permutation(rng, static_cast<int>(n)));
    s.segments.emplace_back(uniform(rng, 0.01, max_duration),
                            SymmetricMatrix(Eigen::MatrixXd(w * rates.asDiagonal() * w.transpose()), 1e-10));
  }
  return s;
}

/// Equal-determinant pair with a traceless D and a horizon above the
/// through-identity minimum, so certify should answer Reachable.
inline SteeringProblem random_reachable_problem(Rng& rng, Eigen::Index n) {
  const Covariance s0 = with_unit_determinant(random_spd(rng, n, 1.0));
  // A traceless scalar spectrum is zero, so n = 1 only admits the trivial problem.
  if (n == 1) return SteeringProblem(s0, s0, Spectrum(std::vector<double>{0.0}), uniform(rng, 0.1, 1.0));
  const Covariance sT = with_unit_determinant(random_spd(rng, n, 1.0));
  Spectrum d = random_spectrum(rng, n, true);
  while (d.is_zero()) d = random_spectrum(rng, n, true);
  const double t_min = min_through_identity_time(s0, sT, d);
  return SteeringProblem(s0, sT, d, t_min * uniform(rng, 1.05, 2.0) + 1e-3);
}

// Worked example: rotation by pi/4 about the second axis.
inline Eigen::MatrixXd example_rotation() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd v(3, 3);
  v << r, 0, r, 0, 1, 0, -r, 0, r;
  return v;
}

inline SteeringProblem example_problem(double horizon = 1.0) {
  const Eigen::MatrixXd v = example_rotation();
  const Eigen::Vector3d lamT(9.0, 1.0, 1.0 / 9.0);
  return SteeringProblem(Covariance::diagonal(Eigen::Vector3d(4.0, 1.0, 0.25)),
                         Covariance(Eigen::MatrixXd(v * lamT.asDiagonal() * v.transpose())),
                         Spectrum(std::vector<double>{2.0, 0.0, -2.0}), horizon);
}

}  // namespace isospec::testing
