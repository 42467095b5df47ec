#include "isospec/simulation.hpp"
#include "isospec/matrix_calculus.hpp"
#include "isospec/synthesis.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

using namespace isospec;
namespace t = isospec::testing;

namespace {

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

ControlSchedule example_schedule() { return synthesize(t::example_problem(1.0)).schedule; }

}  // namespace

TEST(PropagateConstant, ZeroStep) {
  auto rng = t::make_rng(60);
  const auto s = t::random_spd(rng, 3);
  EXPECT_EQ(propagate_constant(s, t::random_symmetric(rng, 3), 0.0).matrix(), s.matrix());
  EXPECT_THROW(propagate_constant(s, t::random_symmetric(rng, 3), -1.0), InvalidInput);
}

TEST(PropagateConstant, ExamplePhases) {
  const auto p = t::example_problem();
  const auto one = propagate_constant(p.sigma0, SymmetricMatrix::diagonal(Eigen::Vector3d(-2, 0, 2)), std::log(4.0) / 4.0);
  EXPECT_LT(max_diff(one.matrix(), Eigen::MatrixXd::Identity(3, 3)), 1e-14);
  const Eigen::MatrixXd v = t::example_rotation();
  const SymmetricMatrix a(Eigen::MatrixXd(v * Eigen::Vector3d(2, 0, -2).asDiagonal() * v.transpose()), 1e-10);
  const auto two = propagate_constant(Covariance::identity(3), a, std::log(9.0) / 4.0);
  EXPECT_LT(max_diff(two.matrix(), p.sigmaT.matrix()), 1e-13);
}

TEST(PropagateConstant, AgreesWithGeneralExponential) {
  auto rng = t::make_rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = t::uniform_int(rng, 1, 5);
    const auto s = t::random_spd(rng, n);
    const auto a = t::random_symmetric(rng, n);
    const double h = t::uniform(rng, 0.0, 0.8);
    const Eigen::MatrixXd e = (h * a.matrix()).exp();
    const Eigen::MatrixXd ref = e * s.matrix() * e;
    EXPECT_LT(max_diff(propagate_constant(s, a, h).matrix(), ref), 1e-11 * (1 + ref.norm()));
  }
}

TEST(SimulateSchedule, EmptySchedule) {
  ControlSchedule empty;
  empty.spectrum = Spectrum(std::vector<double>{1.0, -1.0});
  const auto traj = simulate_schedule(Covariance::identity(2), empty);
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj.times[0], 0.0);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  EXPECT_EQ(csv.str(), "t,s11,s12,s22,lambda1,lambda2,det\n0,1,0,1,1,1,1\n");
}

TEST(SimulateSchedule, ExampleEndpointAndMidPhaseOne) {
  const auto p = t::example_problem();
  const auto s = example_schedule();
  const auto traj = simulate_schedule(p.sigma0, s, 16);
  EXPECT_LT(max_diff(traj.covariances.back().matrix(), p.sigmaT.matrix()), 1e-8);
  EXPECT_NEAR(traj.times.back(), 1.0, 1e-12);
  const auto mid = covariance_at(p.sigma0, s, std::log(4.0) / 8.0);
  EXPECT_LT(max_diff(mid.matrix(), Eigen::Vector3d(2, 1, 0.5).asDiagonal().toDenseMatrix()), 1e-12);
  // transitions factor the covariance
  for (std::size_t i = 0; i < traj.size(); ++i)
    EXPECT_LT(max_diff(traj.transitions[i] * traj.transitions[i].transpose(), traj.covariances[i].matrix()), 1e-10);
}

TEST(SimulateSchedule, DeterminantLaw) {
  auto rng = t::make_rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = t::uniform_int(rng, 1, 5);
    const auto d = t::random_spectrum(rng, n, false);
    const auto s = t::random_isospectral_schedule(rng, d, 3, 0.4);
    const auto s0 = t::random_spd(rng, n);
    const double logdet0 = std::log(s0.matrix().determinant());
    const auto traj = simulate_schedule(s0, s, 8);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double expected = std::exp(logdet0 + 2.0 * d.trace() * traj.times[i]);
      EXPECT_NEAR(traj.covariances[i].matrix().determinant() / expected, 1.0, 1e-8);
    }
  }
}

TEST(Rk4, ZeroGenerator) {
  auto rng = t::make_rng(63);
  const auto s0 = t::random_spd(rng, 3);
  const auto traj = simulate_rk4(s0, [](double) { return SymmetricMatrix::zero(3); }, 1.0, 0.1);
  EXPECT_EQ(traj.size(), 11u);
  EXPECT_LT(max_diff(traj.covariances.back().matrix(), s0.matrix()), 1e-15);
}

TEST(Rk4, ExamplePhaseOne) {
  const auto p = t::example_problem();
  const double t1 = std::log(4.0) / 4.0;
  const auto a = SymmetricMatrix::diagonal(Eigen::Vector3d(-2, 0, 2));
  const auto traj = simulate_rk4(p.sigma0, [&](double) { return a; }, t1, 1e-4);
  EXPECT_NEAR(traj.times.back(), t1, 1e-15);
  EXPECT_LT(max_diff(traj.covariances.back().matrix(), Eigen::MatrixXd::Identity(3, 3)), 1e-8);
}

// Self-convergence oracle for a smoothly rotating generator: with a reference
// at dt/10, errors at dt and dt/2 must shrink by about 2^4.
TEST(Rk4, FourthOrderOnRotatingGenerator) {
  const double omega = 3.0;
  auto gen = [&](double time) {
    const double c = std::cos(omega * time), s = std::sin(omega * time);
    Eigen::Matrix3d r;
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return SymmetricMatrix(Eigen::MatrixXd(r * Eigen::Vector3d(1, 0, -1).asDiagonal() * r.transpose()), 1e-10);
  };
  const auto s0 = Covariance::diagonal(Eigen::Vector3d(2.0, 1.0, 0.5));
  const double T = 1.0, dt = 0.02;
  const Eigen::MatrixXd ref = simulate_rk4(s0, gen, T, dt / 10).covariances.back().matrix();
  const double e1 = max_diff(simulate_rk4(s0, gen, T, dt).covariances.back().matrix(), ref);
  const double e2 = max_diff(simulate_rk4(s0, gen, T, dt / 2).covariances.back().matrix(), ref);
  const double slope = std::log2(e1 / e2);
  EXPECT_NEAR(slope, 4.0, 0.5) << "e1=" << e1 << " e2=" << e2;
}

TEST(Rk4, ScheduleOverloadMatchesExact) {
  const auto p = t::example_problem();
  const auto s = example_schedule();
  const auto traj = simulate_rk4(p.sigma0, s, 1e-3);
  EXPECT_LT(max_diff(traj.covariances.back().matrix(), schedule_endpoint(p.sigma0, s).matrix()), 1e-6);
  for (std::size_t i = 0; i < traj.size(); i += 50)
    EXPECT_LT(max_diff(traj.covariances[i].matrix(), covariance_at(p.sigma0, s, traj.times[i]).matrix()), 1e-6);
}

TEST(Rk4, DivergenceIsReported) {
  const auto a = SymmetricMatrix::diagonal(Eigen::Vector2d(400.0, 0.0));
  EXPECT_THROW(simulate_rk4(Covariance::identity(2), [&](double) { return a; }, 50.0, 0.5), Divergence);
}

TEST(Ensemble, SinglePointAtOrigin) {
  const Ensemble e(Eigen::MatrixXd::Zero(3, 1));
  const auto r = simulate_ensemble(e, example_schedule());
  EXPECT_EQ(r.ensemble.points, Eigen::MatrixXd::Zero(3, 1));
}

TEST(Ensemble, ScaledSquareRootColumns) {
  const auto p = t::example_problem();
  const Eigen::MatrixXd pts = std::sqrt(3.0) * spd_sqrt(p.sigma0).matrix();
  const Ensemble e(pts);
  EXPECT_LT(max_diff(e.second_moment().matrix(), p.sigma0.matrix()), 1e-14);
  const auto r = simulate_ensemble(e, example_schedule());
  EXPECT_LT(max_diff(r.second_moment.matrix(), p.sigmaT.matrix()), 1e-8);
}

TEST(Ensemble, RandomCloudWithExactMoment) {
  auto rng = t::make_rng(64);
  const auto p = t::example_problem();
  Eigen::MatrixXd z = t::gaussian(rng, 3, 100);
  const Eigen::MatrixXd m = z * z.transpose() / 100.0;
  z = Eigen::LLT<Eigen::MatrixXd>(m).matrixL().solve(z);
  const Ensemble e(Eigen::MatrixXd(spd_sqrt(p.sigma0).matrix() * z));
  EXPECT_LT(max_diff(e.second_moment().matrix(), p.sigma0.matrix()), 1e-12);
  const auto r = simulate_ensemble(e, example_schedule());
  EXPECT_LT(max_diff(r.second_moment.matrix(), p.sigmaT.matrix()), 1e-8);
}

TEST(NormGrowth, DiagonalFlowEqualityAtTop) {
  const Spectrum d(std::vector<double>{2.0, 0.0, -2.0});
  ControlSchedule s;
  s.spectrum = d;
  s.segments.emplace_back(0.5, SymmetricMatrix::diagonal(Eigen::Vector3d(2, 0, -2)));
  const auto traj = simulate_schedule(Covariance::identity(3), s, 10);
  const auto report = audit_norm_growth(traj, d);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(std::abs(report.worst_excess), 1e-12);  // k = 1 is tight
}

TEST(NormGrowth, ExampleTrajectory) {
  const auto p = t::example_problem();
  const auto traj = simulate_schedule(p.sigma0, example_schedule(), 20);
  const auto report = audit_norm_growth(traj, p.spectrum);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.worst_top_equality, 1e-10);
  for (const auto& c : traj.covariances) EXPECT_NEAR(c.matrix().determinant(), 1.0, 1e-9);
}

TEST(NormGrowth, RandomIsospectralSchedules) {
  auto rng = t::make_rng(65);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = t::uniform_int(rng, 2, 4);
    const auto d = t::random_spectrum(rng, n, false);
    const auto s = t::random_isospectral_schedule(rng, d, 4, 0.3);
    const auto traj = simulate_schedule(t::random_spd(rng, n), s, 6);
    EXPECT_TRUE(norm_growth_audit(traj, d)) << "trial " << trial;
  }
}

TEST(NormGrowth, DetectsViolation) {
  const Spectrum d(std::vector<double>{1.0, -1.0});
  ControlSchedule s;
  s.spectrum = d;
  s.segments.emplace_back(0.5, SymmetricMatrix::diagonal(Eigen::Vector2d(2.0, -1.0)));  // not isospectral
  EXPECT_FALSE(norm_growth_audit(simulate_schedule(Covariance::identity(2), s, 4), d));
}

TEST(Snapshots, ExampleInstants) {
  const auto p = t::example_problem();
  const auto r = synthesize(p);
  const double t1 = r.witness.t_split;
  const auto snaps = snapshots(p.sigma0, r.schedule, {0.0, t1 / 2, t1, t1 + r.phase2_min / 2, 1.0});
  const std::vector<Eigen::Vector3d> expected{{4, 1, 0.25}, {2, 1, 0.5}, {1, 1, 1}, {3, 1, 1.0 / 3}, {9, 1, 1.0 / 9}};
  ASSERT_EQ(snaps.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_LT((snaps[i].eigenvalues - expected[i]).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Csv, WideHeader) {
  ControlSchedule empty;
  empty.spectrum = Spectrum(std::vector<double>(10, 0.0));
  std::ostringstream csv;
  write_trajectory_csv(csv, simulate_schedule(Covariance::identity(10), empty));
  EXPECT_EQ(csv.str().rfind("t,s1_1,s1_2,", 0), 0u);
}
