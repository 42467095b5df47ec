#include "isospec/simulation.hpp"

#include "isospec/matrix_calculus.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace isospec {

namespace {

Covariance checked_covariance(const Eigen::MatrixXd& m, double t) {
  if (!m.allFinite()) throw Divergence("non-finite covariance at t = " + std::to_string(t));
  try {
    return Covariance(Eigen::MatrixXd((m + m.transpose()) / 2.0));
  } catch (const std::exception&) {
    throw Divergence("covariance lost positive definiteness at t = " + std::to_string(t));
  }
}

Eigen::MatrixXd lyapunov_rhs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s) {
  const Eigen::MatrixXd as = a * s;
  return as + as.transpose();
}

}  // namespace

SymmetricMatrix Ensemble::second_moment() const {
  return SymmetricMatrix(Eigen::MatrixXd(points * points.transpose() / static_cast<double>(points.cols())));
}

Covariance propagate_constant(const Covariance& sigma, const SymmetricMatrix& a, double h) {
  if (!(h >= 0.0)) throw InvalidInput("propagate_constant: step must be non-negative");
  if (a.n() != sigma.n()) throw InvalidInput("propagate_constant: dimension mismatch");
  if (h == 0.0) return sigma;
  const Eigen::MatrixXd e = sym_exp(h * a).matrix();
  return Covariance(Eigen::MatrixXd(e * sigma.matrix() * e), 1e-10);
}

Covariance covariance_at(const Covariance& sigma0, const ControlSchedule& schedule, double t) {
  Covariance s = sigma0;
  double elapsed = 0.0;
  for (const auto& seg : schedule.segments) {
    if (t <= elapsed) break;
    const double h = std::min(seg.duration, t - elapsed);
    s = propagate_constant(s, seg.generator, h);
    elapsed += seg.duration;
  }
  return s;
}

Covariance schedule_endpoint(const Covariance& sigma0, const ControlSchedule& schedule) {
  Covariance s = sigma0;
  for (const auto& seg : schedule.segments) s = propagate_constant(s, seg.generator, seg.duration);
  return s;
}

Trajectory simulate_schedule(const Covariance& sigma0, const ControlSchedule& schedule, int samples_per_segment) {
  if (samples_per_segment < 1) throw InvalidInput("simulate_schedule: samples_per_segment must be >= 1");
  for (const auto& seg : schedule.segments)
    if (seg.generator.n() != sigma0.n()) throw InvalidInput("simulate_schedule: dimension mismatch");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.covariances.push_back(sigma0);
  traj.transitions.push_back(spd_sqrt(sigma0).matrix());

  double t0 = 0.0;
  for (const auto& seg : schedule.segments) {
    const Covariance s_start = traj.covariances.back();
    const Eigen::MatrixXd x_start = traj.transitions.back();
    for (int j = 1; j <= samples_per_segment; ++j) {
      const double tau = seg.duration * j / samples_per_segment;
      const Eigen::MatrixXd e = sym_exp(tau * seg.generator).matrix();
      traj.times.push_back(j == samples_per_segment ? t0 + seg.duration : t0 + tau);
      traj.covariances.emplace_back(Eigen::MatrixXd(e * s_start.matrix() * e), 1e-10);
      traj.transitions.push_back(e * x_start);
    }
    t0 += seg.duration;
  }
  return traj;
}

Trajectory simulate_rk4(const Covariance& sigma0, const GeneratorFn& generator_at, double horizon, double dt) {
  if (!(dt > 0.0) || !(dt <= horizon)) throw InvalidInput("simulate_rk4: need 0 < dt <= T");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.covariances.push_back(sigma0);

  auto rhs = [&](double t, const Eigen::MatrixXd& s) -> Eigen::MatrixXd {
    return lyapunov_rhs(generator_at(t).matrix(), s);
  };
  Eigen::MatrixXd s = sigma0.matrix();
  double t = 0.0;
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  for (long i = 0; i < steps; ++i) {
    const double h = (i + 1 == steps) ? horizon - t : dt;
    s = rk4_step(rhs, t, s, h);
    t = (i + 1 == steps) ? horizon : t + h;
    traj.times.push_back(t);
    traj.covariances.push_back(checked_covariance(s, t));
    s = traj.covariances.back().matrix();
  }
  return traj;
}

Trajectory simulate_rk4(const Covariance& sigma0, const ControlSchedule& schedule, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("simulate_rk4: dt must be positive");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.covariances.push_back(sigma0);

  Eigen::MatrixXd s = sigma0.matrix();
  double t0 = 0.0;
  for (const auto& seg : schedule.segments) {
    const Eigen::MatrixXd& a = seg.generator.matrix();
    auto rhs = [&](double, const Eigen::MatrixXd& y) -> Eigen::MatrixXd { return lyapunov_rhs(a, y); };
    const auto steps = std::max(1L, static_cast<long>(std::ceil(seg.duration / dt - 1e-9)));
    const double h = seg.duration / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
      s = rk4_step(rhs, t0 + i * h, s, h);
      const double t = (i + 1 == steps) ? t0 + seg.duration : t0 + (i + 1) * h;
      traj.times.push_back(t);
      traj.covariances.push_back(checked_covariance(s, t));
      s = traj.covariances.back().matrix();
    }
    t0 += seg.duration;
  }
  return traj;
}

EnsembleResult simulate_ensemble(const Ensemble& ensemble, const ControlSchedule& schedule) {
  Eigen::MatrixXd pts = ensemble.points;
  for (const auto& seg : schedule.segments) {
    if (seg.generator.n() != pts.rows()) throw InvalidInput("simulate_ensemble: dimension mismatch");
    pts = sym_exp(seg.duration * seg.generator).matrix() * pts;
  }
  Ensemble out(std::move(pts));
  SymmetricMatrix m = out.second_moment();
  return {std::move(out), std::move(m)};
}

NormGrowthReport audit_norm_growth(const Trajectory& trajectory, const Spectrum& spectrum, double tol) {
  if (!trajectory.has_transitions()) throw InvalidInput("norm_growth_audit: trajectory has no transitions");
  const auto n = spectrum.n();

  // log of the product of the top-k singular values of each X_t, k = 1..n
  std::vector<Eigen::VectorXd> log_norms;
  log_norms.reserve(trajectory.transitions.size());
  for (const auto& x : trajectory.transitions) {
    if (x.rows() != n) throw InvalidInput("norm_growth_audit: dimension mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    Eigen::VectorXd cum(n);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) cum(k) = (acc += std::log(svd.singularValues()(k)));
    log_norms.push_back(cum);
  }

  NormGrowthReport report;
  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < log_norms.size(); ++i) {
    const double dt = trajectory.times[i] - trajectory.times[i - 1];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double incr = log_norms[i](k) - log_norms[i - 1](k);
      const double bound = spectrum.top_sum(static_cast<std::size_t>(k + 1)) * dt;
      report.worst_excess = std::max(report.worst_excess, incr - bound);
      if (incr > bound + tol) report.passed = false;
      if (k + 1 == n) {
        report.worst_top_equality = std::max(report.worst_top_equality, std::abs(incr - bound));
        if (std::abs(incr - bound) > tol) report.passed = false;
      }
    }
  }
  if (log_norms.size() < 2) report.worst_excess = 0.0;
  return report;
}

bool norm_growth_audit(const Trajectory& trajectory, const Spectrum& spectrum, double tol) {
  return audit_norm_growth(trajectory, spectrum, tol).passed;
}

std::vector<Snapshot> snapshots(const Covariance& sigma0, const ControlSchedule& schedule,
                                const std::vector<double>& instants) {
  std::vector<Snapshot> out;
  for (double t : instants) {
    const auto eig = sym_eig(covariance_at(sigma0, schedule, t).symmetric());
    out.push_back({t, eig.values, eig.vectors});
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  if (trajectory.covariances.empty()) return;
  const auto n = trajectory.covariances.front().n();
  const bool wide = n >= 10;
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      os << ",s" << i + 1;
      if (wide) os << "_";
      os << j + 1;
    }
  for (Eigen::Index i = 0; i < n; ++i) os << ",lambda" << i + 1;
  os << ",det\n";

  const auto old_precision = os.precision(17);
  for (std::size_t r = 0; r < trajectory.size(); ++r) {
    const auto& s = trajectory.covariances[r];
    os << trajectory.times[r];
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) os << "," << s(i, j);
    const auto eig = sym_eig(s.symmetric());
    for (Eigen::Index i = 0; i < n; ++i) os << "," << eig.values(i);
    os << "," << eig.values.prod() << "\n";
  }
  os.precision(old_precision);
}

}  // namespace isospec
