#pragma once

#include "isospec/majorization.hpp"
#include "isospec/reachability.hpp"
#include "isospec/schedule.hpp"

#include <vector>

namespace isospec {

/// Record of how one phase was assembled: its length and the Birkhoff terms
/// (after dropping negligible weights) whose permuted spectra it mixes.
struct PhaseAudit {
  double duration = 0.0;
  std::vector<BirkhoffTerm> terms;
};

struct SynthesisResult {
  ControlSchedule schedule;
  Witness witness;
  PhaseAudit phase1;  // sigma0 -> cI
  PhaseAudit phase2;  // cI -> sigmaT
  double phase1_min = 0.0;
  double phase2_min = 0.0;
};

/// Piecewise-constant schedule steering c*I to sigmaT in time T. All
/// generators are diagonal in the eigenbasis of sigmaT and therefore commute.
ControlSchedule synthesize_from_identity(double c, const Covariance& sigmaT, const Spectrum& d, double horizon,
                                         const Tolerances& tol = {}, PhaseAudit* audit = nullptr);

/// Schedule steering sigma0 to c*I in time t, built as the time reversal of
/// the inflation cI -> sigma0 under -D.
ControlSchedule synthesize_to_identity(const Covariance& sigma0, double c, const Spectrum& d, double horizon,
                                       const Tolerances& tol = {}, PhaseAudit* audit = nullptr);

/// sigma0 -> cI over [0, t_split], then cI -> sigmaT over [t_split, T].
ControlSchedule synthesize_two_phase(const SteeringProblem& problem, const Witness& witness,
                                     const Tolerances& tol = {});

/// Certifies and, when Reachable, builds the schedule with its audit trail.
/// Throws Infeasible for any other verdict.
SynthesisResult synthesize(const SteeringProblem& problem, const Tolerances& tol = {});

bool verify_isospectral(const ControlSchedule& schedule, const Spectrum& d, double tol = 1e-9);

/// Segments in reverse order with negated generators; spectrum becomes -D.
ControlSchedule reverse_schedule(const ControlSchedule& schedule);

}  // namespace isospec
