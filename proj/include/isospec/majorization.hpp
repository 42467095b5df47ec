#pragma once

#include "isospec/types.hpp"

#include <vector>

namespace isospec {

/// A permutation pi of {0..n-1}; acts on vectors by (Pi v)(i) = v(pi(i)),
/// so its matrix is the row selector with Pi(i, pi(i)) = 1.
using Permutation = std::vector<int>;

bool is_permutation(const Permutation& perm);
Eigen::MatrixXd permutation_matrix(const Permutation& perm);

/// Non-negative square matrix with unit row and column sums.
class DoublyStochasticMatrix {
 public:
  explicit DoublyStochasticMatrix(const Eigen::MatrixXd& p);

  const Eigen::MatrixXd& matrix() const { return p_; }
  Eigen::Index n() const { return p_.rows(); }

 private:
  Eigen::MatrixXd p_;
};

struct BirkhoffTerm {
  double weight = 0.0;
  Permutation permutation;
};

struct BirkhoffDecomposition {
  std::vector<BirkhoffTerm> terms;

  Eigen::MatrixXd reconstruct(Eigen::Index n) const;
  double total_weight() const;
};

struct PrefixRow {
  int k = 0;
  double lhs = 0.0;  // prefix sum of the majorized vector, sorted descending
  double rhs = 0.0;  // prefix sum of the majorizing vector, sorted descending
};

/// Prefix-sum comparison behind x < y. Row k = n carries the total sums.
struct MajorizationAudit {
  std::vector<PrefixRow> rows;
  double tol = 0.0;
  bool holds = false;
};

Eigen::VectorXd sorted_descending(const Eigen::VectorXd& v);

MajorizationAudit audit_majorization(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tol);

/// True iff y majorizes x (x < y): equal sums and dominated prefix sums, each within tol.
bool majorizes(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tol);

/// Doubly stochastic P with x = P y, assembled from at most n-1 T-transforms.
/// Throws PreconditionFailed unless y majorizes x within tol.
DoublyStochasticMatrix hlp_transfer_matrix(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double tol = 1e-9);

/// Greedy Birkhoff-von Neumann decomposition driven by bipartite matching on
/// the positive support.
BirkhoffDecomposition birkhoff_decompose(const DoublyStochasticMatrix& p, double support_tol = 1e-12);

/// Entry i is values[perm(i)].
Eigen::VectorXd permute_spectrum(const std::vector<double>& values, const Permutation& perm);

/// Perfect matching on the bipartite graph rows -> columns with edges where
/// support(i, j) holds; returns match[row] = column, or empty if none exists.
std::vector<int> perfect_matching(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& support);

}  // namespace isospec
