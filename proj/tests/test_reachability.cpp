#include "isospec/reachability.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace isospec;
namespace t = isospec::testing;

namespace {

SteeringProblem swapped(const SteeringProblem& p) {
  return SteeringProblem(p.sigmaT, p.sigma0, p.spectrum.negated(), p.horizon);
}

SteeringProblem counterexample() {
  return SteeringProblem(Covariance::diagonal(Eigen::Vector2d(1, 2)), Covariance::diagonal(Eigen::Vector2d(2, 1)),
                         Spectrum(std::vector<double>{0.0, 0.0}), 1.0);
}

}  // namespace

TEST(ForwardNecessary, SameEndpoints) {
  auto rng = t::make_rng(40);
  const auto s = t::random_spd(rng, 4);
  EXPECT_TRUE(forward_necessary(SteeringProblem(s, s, t::random_spectrum(rng, 4, true), 0.3)));
}

TEST(ForwardNecessary, ExampleHorizons) {
  EXPECT_TRUE(forward_necessary(t::example_problem(1.0)));
  // Hand computation at T = 0.5: log lambda_T = (log 9, 0, -log 9) against
  // log lambda_0 + 2T(2,0,-2) = (log 4 + 2, 0, -log 4 - 2).
  const auto audit = forward_audit(t::example_problem(0.5));
  ASSERT_EQ(audit.rows.size(), 3u);
  EXPECT_NEAR(audit.rows[0].lhs, std::log(9.0), 1e-12);
  EXPECT_NEAR(audit.rows[0].rhs, std::log(4.0) + 2.0, 1e-12);
  EXPECT_NEAR(audit.rows[1].rhs, std::log(4.0) + 2.0, 1e-12);
  EXPECT_TRUE(audit.holds);
  // ... which is not enough to certify: 0.5 < log 36 / 4.
  EXPECT_NE(certify(t::example_problem(0.5)).verdict, Verdict::Reachable);
  // Below (log 9 - log 4)/4 even the first prefix fails.
  EXPECT_FALSE(forward_necessary(t::example_problem(0.1)));
}

TEST(ReverseNecessary, Examples) {
  EXPECT_TRUE(reverse_necessary(t::example_problem(1.0)));
  EXPECT_TRUE(reverse_necessary(counterexample()));
  EXPECT_TRUE(forward_necessary(counterexample()));
}

TEST(ReverseNecessary, IsForwardOnSwappedProblem) {
  auto rng = t::make_rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = t::uniform_int(rng, 1, 5);
    const SteeringProblem p(t::random_spd(rng, n), t::random_spd(rng, n), t::random_spectrum(rng, n, trial % 2),
                            t::uniform(rng, 0.1, 2.0));
    EXPECT_EQ(reverse_necessary(p), forward_necessary(swapped(p)));
    EXPECT_EQ(forward_necessary(p), reverse_necessary(swapped(p)));
  }
}

TEST(IdentityReachable, Examples) {
  const auto p = t::example_problem();
  const Spectrum& d = p.spectrum;
  const double t2 = std::log(9.0) / 4.0;
  const auto audit = identity_audit(1.0, d, t2, p.sigmaT);
  EXPECT_TRUE(audit.holds);
  for (const auto& r : audit.rows) EXPECT_NEAR(r.lhs, r.rhs, 1e-12);
  EXPECT_FALSE(identity_reachable(1.0, d, 0.9 * t2, p.sigmaT));
  // an isotropic target with matching determinant is always reachable
  EXPECT_TRUE(identity_reachable(2.0, d, 0.7, Covariance(Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(3, 3)))));
}

TEST(ThroughIdentity, ExampleTimes) {
  const auto p = t::example_problem();
  const auto times = through_identity_times(p.sigma0, p.sigmaT, p.spectrum);
  EXPECT_NEAR(times.c, 1.0, 1e-14);
  EXPECT_NEAR(times.phase1, std::log(4.0) / 4.0, 1e-12);
  EXPECT_NEAR(times.phase2, std::log(9.0) / 4.0, 1e-12);
  EXPECT_EQ(times.binding1, 1);
  EXPECT_EQ(times.binding2, 1);
  EXPECT_NEAR(min_through_identity_time(p.sigma0, p.sigmaT, p.spectrum), std::log(36.0) / 4.0, 1e-12);
}

TEST(ThroughIdentity, HandComputedTwoByTwo) {
  // log-eigenvalues (1, -1); contracting at rate 2*1 takes 1/2, inflating nothing.
  const Covariance s0 = Covariance::diagonal(Eigen::Vector2d(std::exp(1.0), std::exp(-1.0)));
  const Spectrum d(std::vector<double>{1.0, -1.0});
  const auto times = through_identity_times(s0, Covariance::identity(2), d);
  EXPECT_NEAR(times.phase1, 0.5, 1e-14);
  EXPECT_NEAR(times.phase2, 0.0, 1e-14);
  EXPECT_NEAR(min_through_identity_time(s0, Covariance::identity(2), d), 0.5, 1e-14);
}

TEST(ThroughIdentity, DegenerateCases) {
  const Spectrum d(std::vector<double>{1.0, 0.0, -1.0});
  EXPECT_EQ(min_through_identity_time(Covariance::identity(3), Covariance::identity(3), d), 0.0);
  EXPECT_THROW(min_through_identity_time(Covariance::identity(3), 2.0 * Covariance::identity(3), d), InvalidInput);
  EXPECT_THROW(through_identity_times(Covariance::identity(3), Covariance::identity(3),
                                      Spectrum(std::vector<double>{1.0, 1.0, 0.0})),
               PreconditionFailed);
  const Spectrum zero(std::vector<double>{0.0, 0.0});
  EXPECT_THROW(min_through_identity_time(counterexample().sigma0, counterexample().sigmaT, zero), Infeasible);
}

TEST(TwoPhase, ExampleWitness) {
  const auto w = two_phase_feasible(t::example_problem(1.0));
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(w->c, 1.0, 1e-12);
  EXPECT_NEAR(w->t_split, std::log(4.0) / 4.0, 1e-12);
  EXPECT_FALSE(two_phase_feasible(t::example_problem(0.8)).has_value());
}

TEST(TwoPhase, IsotropicEndpoints) {
  const Covariance c = 1.5 * Covariance::identity(3);
  const auto w = two_phase_feasible(SteeringProblem(c, c, Spectrum(std::vector<double>{1, 0, -1}), 0.4));
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(w->c, 1.5, 1e-12);
  EXPECT_EQ(w->t_split, 0.0);
}

TEST(Certify, ExampleIsReachable) {
  const auto cert = certify(t::example_problem(1.0));
  EXPECT_EQ(cert.verdict, Verdict::Reachable);
  EXPECT_EQ(cert.reason, Reason::TwoPhase);
  ASSERT_TRUE(cert.witness.has_value());
  EXPECT_NEAR(cert.witness->c, 1.0, 1e-9);
  EXPECT_NEAR(cert.witness->t_split, std::log(4.0) / 4.0, 1e-9);
  EXPECT_TRUE(cert.forward.holds);
  EXPECT_TRUE(cert.reverse.holds);
}

TEST(Certify, CounterexampleIsUnknown) {
  const auto cert = certify(counterexample());
  EXPECT_EQ(cert.verdict, Verdict::Unknown);
  EXPECT_EQ(cert.reason, Reason::Inconclusive);
  EXPECT_FALSE(cert.witness.has_value());
}

TEST(Certify, DeterminantMismatchIsUnreachable) {
  const auto p = t::example_problem(1.0);
  const auto cert = certify(SteeringProblem(p.sigma0, 1.1 * p.sigmaT, p.spectrum, 1.0));
  EXPECT_EQ(cert.verdict, Verdict::Unreachable);
  EXPECT_EQ(cert.reason, Reason::ForwardNecessaryFailed);
}

TEST(Certify, ShortHorizonIsUnreachable) {
  EXPECT_EQ(certify(t::example_problem(0.1)).verdict, Verdict::Unreachable);
}

TEST(Certify, IsotropicStartIsExact) {
  const auto p = t::example_problem();
  const auto cert = certify(SteeringProblem(Covariance::identity(3), p.sigmaT, p.spectrum, std::log(9.0) / 4.0));
  EXPECT_EQ(cert.verdict, Verdict::Reachable);
  EXPECT_EQ(cert.reason, Reason::IsotropicExact);
  EXPECT_EQ(cert.witness->t_split, 0.0);
  // below the exact threshold the isotropic condition is also necessary
  const auto no = certify(SteeringProblem(Covariance::identity(3), p.sigmaT, p.spectrum, 0.5));
  EXPECT_EQ(no.verdict, Verdict::Unreachable);
}

TEST(Certify, NonTracelessSpectrum) {
  // D = D0 + I multiplies the reachable endpoints by e^{2T}.
  const auto p = t::example_problem(1.0);
  const SteeringProblem q(p.sigma0, std::exp(2.0) * p.sigmaT, Spectrum(std::vector<double>{3.0, 1.0, -1.0}), 1.0);
  const auto cert = certify(q);
  EXPECT_EQ(cert.verdict, Verdict::Reachable);
  ASSERT_TRUE(cert.witness.has_value());
  EXPECT_NEAR(cert.witness->t_split, std::log(4.0) / 4.0, 1e-9);
  // the waypoint c I is passed at t_split with c = e^{2 t_split}
  EXPECT_NEAR(cert.witness->c, std::exp(2.0 * cert.witness->t_split), 1e-9);
}

TEST(Certify, VerdictsAgreeUnderTimeReversal) {
  auto rng = t::make_rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = t::uniform_int(rng, 1, 4);
    SteeringProblem p = (trial % 3 == 0) ? t::random_reachable_problem(rng, n)
                                         : SteeringProblem(t::with_unit_determinant(t::random_spd(rng, n)),
                                                           t::with_unit_determinant(t::random_spd(rng, n)),
                                                           t::random_spectrum(rng, n, true), t::uniform(rng, 0.05, 1.5));
    EXPECT_EQ(certify(p).verdict, certify(swapped(p)).verdict) << "trial " << trial;
  }
}

TEST(Certify, ReasonStrings) {
  EXPECT_EQ(to_string(Verdict::Reachable), "Reachable");
  EXPECT_EQ(to_string(Reason::TwoPhase), "two-phase");
  EXPECT_EQ(to_string(Reason::ReverseNecessaryFailed), "reverse-necessary-failed");
}
