#pragma once

#include "isospec/schedule.hpp"
#include "isospec/types.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace isospec {

/// Sampled solution of the Lyapunov flow. When present, transitions[i] is a
/// factor X with covariances[i] = X X^T.
struct Trajectory {
  std::vector<double> times;
  std::vector<Covariance> covariances;
  std::vector<Eigen::MatrixXd> transitions;

  bool has_transitions() const { return !transitions.empty(); }
  std::size_t size() const { return times.size(); }
};

/// Point cloud stored column-wise (n x N).
struct Ensemble {
  Eigen::MatrixXd points;

  explicit Ensemble(Eigen::MatrixXd p) : points(std::move(p)) {
    if (points.cols() < 1) throw InvalidInput("ensemble needs at least one point");
  }
  Eigen::Index dimension() const { return points.rows(); }
  Eigen::Index size() const { return points.cols(); }

  /// (1/N) sum x x^T.
  SymmetricMatrix second_moment() const;
};

struct EnsembleResult {
  Ensemble ensemble;
  SymmetricMatrix second_moment;
};

/// e^{hA} sigma e^{hA}.
Covariance propagate_constant(const Covariance& sigma, const SymmetricMatrix& a, double h);

/// Covariance at time t under the schedule (clamped to [0, total duration]).
Covariance covariance_at(const Covariance& sigma0, const ControlSchedule& schedule, double t);

Covariance schedule_endpoint(const Covariance& sigma0, const ControlSchedule& schedule);

/// Exact piecewise propagation sampled uniformly inside each segment; also
/// carries X_t from the symmetric square root of sigma0.
Trajectory simulate_schedule(const Covariance& sigma0, const ControlSchedule& schedule, int samples_per_segment = 32);

using GeneratorFn = std::function<SymmetricMatrix(double)>;

/// One classical Runge-Kutta step for y' = f(t, y).
template <typename State, typename F>
State rk4_step(F&& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Fixed-step RK4 for sigma' = A_t sigma + sigma A_t on [0, T]; the last step
/// is shortened to land on T.
Trajectory simulate_rk4(const Covariance& sigma0, const GeneratorFn& generator_at, double horizon, double dt);

/// RK4 over a piecewise-constant schedule. Each segment is integrated on its
/// own uniform grid with step at most dt so no step straddles a switch.
Trajectory simulate_rk4(const Covariance& sigma0, const ControlSchedule& schedule, double dt);

/// Maps every point through the ordered product of segment exponentials.
EnsembleResult simulate_ensemble(const Ensemble& ensemble, const ControlSchedule& schedule);

struct NormGrowthReport {
  bool passed = true;
  double worst_excess = 0.0;      // max over (k, s, t) of increment - bound
  double worst_top_equality = 0.0;  // max |increment - tr(D)(t - s)| at k = n
};

/// Checks log||wedge^k X_t|| - log||wedge^k X_s|| <= (sum of top-k of D)(t - s)
/// for every k and consecutive sample pair, with equality at k = n.
NormGrowthReport audit_norm_growth(const Trajectory& trajectory, const Spectrum& spectrum,
                                   double tol = 1e-8);
bool norm_growth_audit(const Trajectory& trajectory, const Spectrum& spectrum, double tol = 1e-8);

/// Eigen-structure of the covariance at one instant (ellipsoid axes).
struct Snapshot {
  double t = 0.0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

std::vector<Snapshot> snapshots(const Covariance& sigma0, const ControlSchedule& schedule,
                                const std::vector<double>& instants);

/// Header: t,s11,s12,...,snn (upper triangle, row-major),lambda1..lambdan,det.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace isospec
