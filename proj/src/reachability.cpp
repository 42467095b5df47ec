#include "isospec/reachability.hpp"

#include "isospec/matrix_calculus.hpp"

#include <limits>

namespace isospec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Prefix index k < n with the least slack rhs - lhs; 0 for n = 1.
int tightest_prefix(const MajorizationAudit& audit) {
  double least = kInf;
  for (std::size_t i = 0; i + 1 < audit.rows.size(); ++i)
    least = std::min(least, audit.rows[i].rhs - audit.rows[i].lhs);
  for (std::size_t i = 0; i + 1 < audit.rows.size(); ++i)
    if (audit.rows[i].rhs - audit.rows[i].lhs <= least + 1e-12 * (1.0 + std::abs(least))) return audit.rows[i].k;
  return 0;
}

struct PhaseBound {
  double time = 0.0;
  int binding = 0;
};

// Smallest t >= 0 with x < 2 t * rates, where x sums to zero and rates is a
// descending traceless spectrum.
PhaseBound phase_bound(const Eigen::VectorXd& x, const Eigen::VectorXd& rates, double slack) {
  const Eigen::VectorXd xs = sorted_descending(x);
  const auto n = xs.size();
  std::vector<double> ratios;
  double num = 0.0, den = 0.0, worst = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    num += xs(k);
    den += 2.0 * rates(k);
    double r;
    if (den > 1e-300)
      r = num / den;
    else
      r = (num <= slack) ? 0.0 : kInf;
    ratios.push_back(r);
    worst = std::max(worst, r);
  }
  PhaseBound out{worst, 0};
  if (worst > 0.0 && std::isfinite(worst)) {
    for (std::size_t i = 0; i < ratios.size(); ++i)
      if (ratios[i] >= worst - 1e-12 * (1.0 + worst)) {
        out.binding = static_cast<int>(i + 1);
        break;
      }
  } else if (!std::isfinite(worst)) {
    for (std::size_t i = 0; i < ratios.size(); ++i)
      if (!std::isfinite(ratios[i])) {
        out.binding = static_cast<int>(i + 1);
        break;
      }
  }
  return out;
}

bool determinants_agree(const Eigen::VectorXd& log0, const Eigen::VectorXd& logT, double rel_tol) {
  return std::abs(std::expm1(log0.sum() - logT.sum())) <= rel_tol;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Unreachable:
      return "Unreachable";
    case Verdict::Reachable:
      return "Reachable";
    case Verdict::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

std::string to_string(Reason r) {
  switch (r) {
    case Reason::ForwardNecessaryFailed:
      return "forward-necessary-failed";
    case Reason::ReverseNecessaryFailed:
      return "reverse-necessary-failed";
    case Reason::IsotropicExact:
      return "isotropic-exact";
    case Reason::TwoPhase:
      return "two-phase";
    case Reason::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double scaled_majorization_tol(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Tolerances& tol) {
  return tol.majorization * (1.0 + std::max(max_abs_entry(a), max_abs_entry(b)));
}

MajorizationAudit forward_audit(const SteeringProblem& problem, const Tolerances& tol) {
  const Eigen::VectorXd x = log_eigenvalues(problem.sigmaT);
  const Eigen::VectorXd y = log_eigenvalues(problem.sigma0) + 2.0 * problem.horizon * problem.spectrum.vector();
  return audit_majorization(y, x, scaled_majorization_tol(x, y, tol));
}

MajorizationAudit reverse_audit(const SteeringProblem& problem, const Tolerances& tol) {
  const SteeringProblem reversed(problem.sigmaT, problem.sigma0, problem.spectrum.negated(), problem.horizon);
  return forward_audit(reversed, tol);
}

bool forward_necessary(const SteeringProblem& problem, const Tolerances& tol) {
  return forward_audit(problem, tol).holds;
}

bool reverse_necessary(const SteeringProblem& problem, const Tolerances& tol) {
  return reverse_audit(problem, tol).holds;
}

MajorizationAudit identity_audit(double c, const Spectrum& d, double horizon, const Covariance& sigmaT,
                                 const Tolerances& tol) {
  if (!(c > 0.0)) throw InvalidInput("identity_reachable: c must be positive");
  if (!(horizon >= 0.0)) throw InvalidInput("identity_reachable: horizon must be non-negative");
  if (d.n() != sigmaT.n()) throw InvalidInput("identity_reachable: dimension mismatch");
  const Eigen::VectorXd x = log_eigenvalues(sigmaT);
  const Eigen::VectorXd y =
      Eigen::VectorXd::Constant(d.n(), std::log(c)) + 2.0 * horizon * d.vector();
  return audit_majorization(y, x, scaled_majorization_tol(x, y, tol));
}

bool identity_reachable(double c, const Spectrum& d, double horizon, const Covariance& sigmaT,
                        const Tolerances& tol) {
  return identity_audit(c, d, horizon, sigmaT, tol).holds;
}

ThroughIdentityTimes through_identity_times(const Covariance& sigma0, const Covariance& sigmaT, const Spectrum& d,
                                            const Tolerances& tol) {
  if (sigma0.n() != sigmaT.n() || sigma0.n() != d.n()) throw InvalidInput("dimension mismatch");
  if (!d.traceless()) throw PreconditionFailed("through-identity times need a traceless spectrum");
  const Eigen::VectorXd log0 = log_eigenvalues(sigma0);
  const Eigen::VectorXd logT = log_eigenvalues(sigmaT);
  if (!determinants_agree(log0, logT, tol.determinant))
    throw InvalidInput("through-identity steering needs det(sigma0) = det(sigmaT)");

  const auto n = static_cast<double>(d.n());
  ThroughIdentityTimes out;
  const double log_c = log0.sum() / n;
  out.c = std::exp(log_c);

  const Eigen::VectorXd x0 = log0.array() - log_c;
  const Eigen::VectorXd xT = logT.array() - log_c;
  const PhaseBound p1 = phase_bound(x0, d.negated().vector(), scaled_majorization_tol(x0, x0, tol));
  const PhaseBound p2 = phase_bound(xT, d.vector(), scaled_majorization_tol(xT, xT, tol));
  out.phase1 = p1.time;
  out.phase2 = p2.time;
  out.binding1 = p1.binding;
  out.binding2 = p2.binding;
  return out;
}

std::optional<Witness> two_phase_feasible(const SteeringProblem& problem, const Tolerances& tol) {
  if (!problem.spectrum.traceless()) throw PreconditionFailed("two_phase_feasible: spectrum must be traceless");
  ThroughIdentityTimes times;
  try {
    times = through_identity_times(problem.sigma0, problem.sigmaT, problem.spectrum, tol);
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
  if (!std::isfinite(times.total()) || times.total() > problem.horizon + tol.time) return std::nullopt;
  return Witness{times.c, std::min(times.phase1, problem.horizon), times.binding1};
}

double min_through_identity_time(const Covariance& sigma0, const Covariance& sigmaT, const Spectrum& d,
                                 const Tolerances& tol) {
  if (sigma0.n() != sigmaT.n() || sigma0.n() != d.n()) throw InvalidInput("dimension mismatch");
  if (!determinants_agree(log_eigenvalues(sigma0), log_eigenvalues(sigmaT), tol.determinant))
    throw InvalidInput("min_through_identity_time: determinants differ");
  const bool zero = std::all_of(d.values().begin(), d.values().end(), [](double v) { return std::abs(v) <= 1e-12; });
  if (zero) {
    const double gap = (sigma0.matrix() - sigmaT.matrix()).norm();
    if (gap <= 1e-9 * (1.0 + sigma0.matrix().norm())) return 0.0;
    throw Infeasible("min_through_identity_time: zero spectrum cannot move the covariance");
  }
  const auto times = through_identity_times(sigma0, sigmaT, d, tol);
  if (!std::isfinite(times.total())) throw Infeasible("min_through_identity_time: no finite horizon");
  return times.total();
}

bool is_isotropic(const Covariance& s, const Tolerances& tol) {
  const double tr = s.matrix().trace();
  const auto n = s.n();
  const Eigen::MatrixXd dev = s.matrix() - (tr / static_cast<double>(n)) * Eigen::MatrixXd::Identity(n, n);
  return dev.norm() <= tol.isotropic * tr;
}

ReachabilityCertificate certify(const SteeringProblem& problem, const Tolerances& tol) {
  ReachabilityCertificate cert;
  cert.forward = forward_audit(problem, tol);
  cert.reverse = reverse_audit(problem, tol);

  if (!cert.forward.holds) {
    cert.verdict = Verdict::Unreachable;
    cert.reason = Reason::ForwardNecessaryFailed;
    return cert;
  }
  if (!cert.reverse.holds) {
    cert.verdict = Verdict::Unreachable;
    cert.reason = Reason::ReverseNecessaryFailed;
    return cert;
  }

  const auto n = static_cast<double>(problem.n());
  const double T = problem.horizon;
  if (is_isotropic(problem.sigma0, tol)) {
    const double c = problem.sigma0.matrix().trace() / n;
    const auto audit = identity_audit(c, problem.spectrum, T, problem.sigmaT, tol);
    if (audit.holds) {
      cert.verdict = Verdict::Reachable;
      cert.reason = Reason::IsotropicExact;
      cert.witness = Witness{c, 0.0, tightest_prefix(audit)};
      return cert;
    }
  }
  if (is_isotropic(problem.sigmaT, tol)) {
    const double c = problem.sigmaT.matrix().trace() / n;
    const auto audit = identity_audit(c, problem.spectrum.negated(), T, problem.sigma0, tol);
    if (audit.holds) {
      cert.verdict = Verdict::Reachable;
      cert.reason = Reason::IsotropicExact;
      cert.witness = Witness{c, T, tightest_prefix(audit)};
      return cert;
    }
  }

  // The two-phase test runs on the traceless problem; the waypoint is mapped
  // back through the isotropic rescaling e^{-2 alpha t}.
  const double alpha = trace_shift(problem.spectrum);
  if (auto w = two_phase_feasible(trace_normalize(problem), tol)) {
    w->c *= std::exp(-2.0 * alpha * w->t_split);
    cert.verdict = Verdict::Reachable;
    cert.reason = Reason::TwoPhase;
    cert.witness = *w;
    return cert;
  }

  cert.verdict = Verdict::Unknown;
  cert.reason = Reason::Inconclusive;
  return cert;
}

}  // namespace isospec
