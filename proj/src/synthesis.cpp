#include "isospec/synthesis.hpp"

#include "isospec/matrix_calculus.hpp"

#include <algorithm>

namespace isospec {

ControlSchedule synthesize_from_identity(double c, const Covariance& sigmaT, const Spectrum& d, double horizon,
                                         const Tolerances& tol, PhaseAudit* audit) {
  if (!identity_reachable(c, d, horizon, sigmaT, tol))
    throw Infeasible("synthesize_from_identity: target is not reachable from c*I in the given time");

  ControlSchedule schedule;
  schedule.spectrum = d;
  if (audit) *audit = PhaseAudit{horizon, {}};
  if (horizon <= 0.0) return schedule;

  const auto eig = sym_eig(sigmaT.symmetric());
  const Eigen::VectorXd x = eig.values.array().log() - std::log(c);
  const Eigen::VectorXd y = 2.0 * horizon * d.vector();
  const auto p = hlp_transfer_matrix(y, x, scaled_majorization_tol(x, y, tol));
  auto decomposition = birkhoff_decompose(p, tol.support);

  // Negligible weights would give zero-length segments; drop them and
  // renormalize so the phase keeps its length.
  auto& terms = decomposition.terms;
  std::erase_if(terms, [&](const BirkhoffTerm& t) { return t.weight < tol.support; });
  if (terms.empty()) throw NumericalDegeneracy("synthesize_from_identity: Birkhoff decomposition is empty");
  const double total = decomposition.total_weight();
  for (auto& t : terms) t.weight /= total;
  std::stable_sort(terms.begin(), terms.end(),
                   [](const BirkhoffTerm& a, const BirkhoffTerm& b) { return a.weight > b.weight; });

  for (const auto& t : terms) {
    const Eigen::VectorXd rates = permute_spectrum(d.values(), t.permutation);
    const Eigen::MatrixXd a = eig.vectors * rates.asDiagonal() * eig.vectors.transpose();
    schedule.segments.emplace_back(t.weight * horizon, SymmetricMatrix(a, 1e-10));
  }
  if (audit) audit->terms = terms;
  return schedule;
}

ControlSchedule synthesize_to_identity(const Covariance& sigma0, double c, const Spectrum& d, double horizon,
                                       const Tolerances& tol, PhaseAudit* audit) {
  const ControlSchedule inflate = synthesize_from_identity(c, sigma0, d.negated(), horizon, tol, audit);
  ControlSchedule out = reverse_schedule(inflate);
  out.spectrum = d;
  if (audit) {
    // Re-express the permutations against D: the sorted spectrum of -D is
    // minus the reversed spectrum of D.
    const int last = static_cast<int>(d.n()) - 1;
    for (auto& t : audit->terms)
      for (int& p : t.permutation) p = last - p;
    std::reverse(audit->terms.begin(), audit->terms.end());
  }
  return out;
}

namespace {

ControlSchedule assemble_two_phase(const SteeringProblem& problem, const Witness& witness, const Tolerances& tol,
                                   PhaseAudit* audit1, PhaseAudit* audit2) {
  const double T = problem.horizon;
  if (!(witness.c > 0.0) || witness.t_split < -tol.time || witness.t_split > T + tol.time)
    throw Infeasible("synthesize_two_phase: witness is outside the horizon");
  const double t_split = std::clamp(witness.t_split, 0.0, T);

  ControlSchedule schedule;
  schedule.spectrum = problem.spectrum;
  if (t_split > 0.0) {
    auto phase1 = synthesize_to_identity(problem.sigma0, witness.c, problem.spectrum, t_split, tol, audit1);
    for (auto& s : phase1.segments) schedule.segments.push_back(std::move(s));
  }
  if (T - t_split > 0.0) {
    auto phase2 = synthesize_from_identity(witness.c, problem.sigmaT, problem.spectrum, T - t_split, tol, audit2);
    for (auto& s : phase2.segments) schedule.segments.push_back(std::move(s));
  }
  return schedule;
}

}  // namespace

ControlSchedule synthesize_two_phase(const SteeringProblem& problem, const Witness& witness,
                                     const Tolerances& tol) {
  return assemble_two_phase(problem, witness, tol, nullptr, nullptr);
}

SynthesisResult synthesize(const SteeringProblem& problem, const Tolerances& tol) {
  const auto cert = certify(problem, tol);
  if (cert.verdict != Verdict::Reachable)
    throw Infeasible("synthesize: problem is " + to_string(cert.verdict) + " (" + to_string(cert.reason) + ")");

  SynthesisResult out;
  out.witness = *cert.witness;
  out.schedule = assemble_two_phase(problem, out.witness, tol, &out.phase1, &out.phase2);

  out.phase1_min = out.phase1.duration;
  out.phase2_min = out.phase2.duration;
  try {
    const auto normalized = trace_normalize(problem);
    const auto times = through_identity_times(normalized.sigma0, normalized.sigmaT, normalized.spectrum, tol);
    if (std::isfinite(times.total())) {
      out.phase1_min = std::min(times.phase1, out.phase1.duration);
      out.phase2_min = std::min(times.phase2, out.phase2.duration);
    }
  } catch (const std::exception&) {
    // Phase lower bounds are informational only.
  }
  return out;
}

bool verify_isospectral(const ControlSchedule& schedule, const Spectrum& d, double tol) {
  const Eigen::VectorXd target = d.vector();
  for (const auto& seg : schedule.segments) {
    if (seg.generator.n() != d.n()) return false;
    const auto eig = sym_eig(seg.generator);
    if ((eig.values - target).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

ControlSchedule reverse_schedule(const ControlSchedule& schedule) {
  ControlSchedule out;
  out.spectrum = schedule.spectrum.values().empty() ? schedule.spectrum : schedule.spectrum.negated();
  for (auto it = schedule.segments.rbegin(); it != schedule.segments.rend(); ++it)
    out.segments.emplace_back(it->duration, -it->generator);
  return out;
}

}  // namespace isospec
