#pragma once

#include "isospec/majorization.hpp"
#include "isospec/types.hpp"

#include <optional>
#include <string>

namespace isospec {

enum class Verdict { Unreachable, Reachable, Unknown };

enum class Reason {
  ForwardNecessaryFailed,
  ReverseNecessaryFailed,
  IsotropicExact,
  TwoPhase,
  Inconclusive,
};

std::string to_string(Verdict v);
std::string to_string(Reason r);

/// Isotropic waypoint c*I, reached at t_split. binding_prefix is the prefix
/// index k that limits the certifying majorization (0 when none binds).
struct Witness {
  double c = 1.0;
  double t_split = 0.0;
  int binding_prefix = 0;
};

struct ReachabilityCertificate {
  Verdict verdict = Verdict::Unknown;
  Reason reason = Reason::Inconclusive;
  std::optional<Witness> witness;
  MajorizationAudit forward;
  MajorizationAudit reverse;
};

/// Minimal phase durations for steering through c*I, c = det(sigma0)^{1/n}.
struct ThroughIdentityTimes {
  double c = 1.0;
  double phase1 = 0.0;  // sigma0 -> cI
  double phase2 = 0.0;  // cI -> sigmaT
  int binding1 = 0;
  int binding2 = 0;

  double total() const { return phase1 + phase2; }
};

/// Slack used for prefix comparisons on log-spectra: tol * (1 + max |entry|).
double scaled_majorization_tol(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Tolerances& tol);

MajorizationAudit forward_audit(const SteeringProblem& problem, const Tolerances& tol = {});
MajorizationAudit reverse_audit(const SteeringProblem& problem, const Tolerances& tol = {});

/// log lambda(sigmaT) < log lambda(sigma0) + 2T lambda_D, both summands sorted descending.
bool forward_necessary(const SteeringProblem& problem, const Tolerances& tol = {});

/// The same condition on the time-reversed problem (sigmaT, sigma0, -D).
bool reverse_necessary(const SteeringProblem& problem, const Tolerances& tol = {});

MajorizationAudit identity_audit(double c, const Spectrum& d, double horizon, const Covariance& sigmaT,
                                 const Tolerances& tol = {});

/// Exact reachability of sigmaT from c*I in time `horizon`.
bool identity_reachable(double c, const Spectrum& d, double horizon, const Covariance& sigmaT,
                        const Tolerances& tol = {});

/// Phase-duration lower bounds for the contract-then-inflate route. Requires
/// traceless D and equal determinants; a phase that cannot finish is +inf.
ThroughIdentityTimes through_identity_times(const Covariance& sigma0, const Covariance& sigmaT, const Spectrum& d,
                                            const Tolerances& tol = {});

/// Witness (c, t_split) for the two-phase construction, if the horizon allows it.
std::optional<Witness> two_phase_feasible(const SteeringProblem& problem, const Tolerances& tol = {});

/// Shortest horizon for the through-identity route; an upper bound on the
/// true minimal steering time.
double min_through_identity_time(const Covariance& sigma0, const Covariance& sigmaT, const Spectrum& d,
                                 const Tolerances& tol = {});

bool is_isotropic(const Covariance& s, const Tolerances& tol = {});

ReachabilityCertificate certify(const SteeringProblem& problem, const Tolerances& tol = {});

}  // namespace isospec
