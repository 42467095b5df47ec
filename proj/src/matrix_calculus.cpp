#include "isospec/matrix_calculus.hpp"

namespace isospec {

SymmetricMatrix ot_generator(const Covariance& sigma0, const Covariance& sigmaT, double horizon) {
  if (sigma0.n() != sigmaT.n()) throw InvalidInput("ot_generator: dimension mismatch");
  if (!(horizon > 0.0)) throw InvalidInput("ot_generator: horizon must be positive");

  const Eigen::MatrixXd r = spd_sqrt(sigma0).matrix();
  const Eigen::MatrixXd r_inv = spd_inv_sqrt(sigma0).matrix();
  const Covariance inner(Eigen::MatrixXd(r * sigmaT.matrix() * r), 1e-9);
  const Covariance m(Eigen::MatrixXd(r_inv * spd_sqrt(inner).matrix() * r_inv), 1e-9);
  return (1.0 / horizon) * spd_log(m);
}

double shear_cost(const ControlSchedule& schedule) {
  double j = 0.0;
  for (const auto& seg : schedule.segments) {
    const auto& a = seg.generator.matrix();
    j += seg.duration * (a * a).trace();
  }
  return j;
}

double trace_shift(const Spectrum& spectrum) {
  if (spectrum.traceless()) return 0.0;
  return -spectrum.trace() / static_cast<double>(spectrum.n());
}

SteeringProblem trace_normalize(const SteeringProblem& problem) {
  const double alpha = trace_shift(problem.spectrum);
  if (alpha == 0.0) return problem;
  return SteeringProblem(problem.sigma0, std::exp(2.0 * problem.horizon * alpha) * problem.sigmaT,
                         problem.spectrum.shifted(alpha), problem.horizon);
}

}  // namespace isospec
