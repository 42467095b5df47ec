#include "isospec/majorization.hpp"

#include <functional>
#include <limits>
#include <numeric>

namespace isospec {

namespace {

std::vector<int> descending_order(const Eigen::VectorXd& v) {
  std::vector<int> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v(a) > v(b); });
  return order;
}

}  // namespace

bool is_permutation(const Permutation& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= perm.size() || seen[static_cast<std::size_t>(p)]) return false;
    seen[static_cast<std::size_t>(p)] = true;
  }
  return true;
}

Eigen::MatrixXd permutation_matrix(const Permutation& perm) {
  if (!is_permutation(perm)) throw InvalidInput("not a permutation");
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, perm[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

DoublyStochasticMatrix::DoublyStochasticMatrix(const Eigen::MatrixXd& p) : p_(p) {
  if (p_.rows() != p_.cols() || p_.rows() == 0) throw InvalidInput("doubly stochastic matrix must be square");
  if (!p_.allFinite()) throw InvalidInput("doubly stochastic matrix has non-finite entries");
  for (Eigen::Index i = 0; i < p_.rows(); ++i)
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      if (p_(i, j) < -1e-12) throw InvalidInput("doubly stochastic matrix has a negative entry");
      if (p_(i, j) < 0.0) p_(i, j) = 0.0;
    }
  const double row_err = (p_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col_err = (p_.colwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_err > 1e-10 || col_err > 1e-10) throw InvalidInput("row or column sums differ from one");
}

Eigen::MatrixXd BirkhoffDecomposition::reconstruct(Eigen::Index n) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : terms) m += t.weight * permutation_matrix(t.permutation);
  return m;
}

double BirkhoffDecomposition::total_weight() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight;
  return s;
}

Eigen::VectorXd sorted_descending(const Eigen::VectorXd& v) {
  Eigen::VectorXd s = v;
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  return s;
}

MajorizationAudit audit_majorization(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tol) {
  if (x.size() != y.size()) throw InvalidInput("majorization: length mismatch");
  const Eigen::VectorXd xs = sorted_descending(x);
  const Eigen::VectorXd ys = sorted_descending(y);

  MajorizationAudit audit;
  audit.tol = tol;
  audit.holds = true;
  double lhs = 0.0, rhs = 0.0;
  const auto n = x.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    lhs += xs(k);
    rhs += ys(k);
    audit.rows.push_back({static_cast<int>(k + 1), lhs, rhs});
    const bool ok = (k + 1 == n) ? std::abs(lhs - rhs) <= tol : lhs <= rhs + tol;
    audit.holds = audit.holds && ok;
  }
  return audit;
}

bool majorizes(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tol) {
  return audit_majorization(y, x, tol).holds;
}

DoublyStochasticMatrix hlp_transfer_matrix(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tol) {
  if (!majorizes(y, x, tol)) throw PreconditionFailed("hlp_transfer_matrix: y does not majorize x");
  const auto n = y.size();

  const auto oy = descending_order(y);
  const auto ox = descending_order(x);
  Eigen::VectorXd z(n), xs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z(i) = y(oy[static_cast<std::size_t>(i)]);
    xs(i) = x(ox[static_cast<std::size_t>(i)]);
  }

  // Robin Hood transfers on the sorted vectors: move mass from the last
  // coordinate still above target to the first later coordinate below it.
  const double eps = 1e-13 * (1.0 + std::max(max_abs_entry(z), max_abs_entry(xs)));
  Eigen::MatrixXd sorted_p = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index j = -1;
    for (Eigen::Index i = n - 1; i >= 0; --i)
      if (z(i) - xs(i) > eps) {
        j = i;
        break;
      }
    if (j < 0) break;
    Eigen::Index k = -1;
    for (Eigen::Index i = j + 1; i < n; ++i)
      if (xs(i) - z(i) > eps) {
        k = i;
        break;
      }
    if (k < 0) break;

    const double gap_j = z(j) - xs(j);
    const double gap_k = xs(k) - z(k);
    const double delta = std::min(gap_j, gap_k);
    const double mix = delta / (z(j) - z(k));

    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    t(j, j) = 1.0 - mix;
    t(k, k) = 1.0 - mix;
    t(j, k) = mix;
    t(k, j) = mix;
    sorted_p = t * sorted_p;

    const double zj = z(j), zk = z(k);
    z(j) = (1.0 - mix) * zj + mix * zk;
    z(k) = mix * zj + (1.0 - mix) * zk;
    if (gap_j <= gap_k) z(j) = xs(j);
    if (gap_k <= gap_j) z(k) = xs(k);
  }

  // Undo the sorts: P = Sx^T * sorted_p * Sy with row selectors Sx, Sy.
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      p(ox[static_cast<std::size_t>(a)], oy[static_cast<std::size_t>(b)]) = sorted_p(a, b);
  return DoublyStochasticMatrix(p);
}

std::vector<int> perfect_matching(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& support) {
  const int n = static_cast<int>(support.rows());
  std::vector<int> col_owner(static_cast<std::size_t>(n), -1);

  std::vector<bool> visited;
  std::function<bool(int)> augment = [&](int row) -> bool {
    for (int c = 0; c < n; ++c) {
      if (!support(row, c) || visited[static_cast<std::size_t>(c)]) continue;
      visited[static_cast<std::size_t>(c)] = true;
      if (col_owner[static_cast<std::size_t>(c)] < 0 || augment(col_owner[static_cast<std::size_t>(c)])) {
        col_owner[static_cast<std::size_t>(c)] = row;
        return true;
      }
    }
    return false;
  };

  for (int r = 0; r < n; ++r) {
    visited.assign(static_cast<std::size_t>(n), false);
    if (!augment(r)) return {};
  }
  std::vector<int> match(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) match[static_cast<std::size_t>(col_owner[static_cast<std::size_t>(c)])] = c;
  return match;
}

BirkhoffDecomposition birkhoff_decompose(const DoublyStochasticMatrix& p, double support_tol) {
  const auto n = p.n();
  Eigen::MatrixXd residual = p.matrix();
  BirkhoffDecomposition out;

  // Each pass zeroes at least one support entry, so this bound is never hit
  // for valid input.
  const Eigen::Index max_terms = n * n;
  while (residual.maxCoeff() > support_tol) {
    if (static_cast<Eigen::Index>(out.terms.size()) >= max_terms)
      throw NumericalDegeneracy("birkhoff_decompose: term budget exhausted");
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support =
        (residual.array() > support_tol).matrix();
    std::vector<int> match = perfect_matching(support);
    if (match.empty())
      throw NumericalDegeneracy("birkhoff_decompose: no perfect matching on residual support");

    double w = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) w = std::min(w, residual(i, match[static_cast<std::size_t>(i)]));
    for (Eigen::Index i = 0; i < n; ++i) {
      double& e = residual(i, match[static_cast<std::size_t>(i)]);
      e = (e - w <= support_tol) ? 0.0 : e - w;
    }
    out.terms.push_back({w, std::move(match)});
  }
  return out;
}

Eigen::VectorXd permute_spectrum(const std::vector<double>& values, const Permutation& perm) {
  if (perm.size() != values.size() || !is_permutation(perm))
    throw InvalidInput("permute_spectrum: not a bijection on the spectrum indices");
  Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < perm.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = values[static_cast<std::size_t>(perm[i])];
  return out;
}

}  // namespace isospec
