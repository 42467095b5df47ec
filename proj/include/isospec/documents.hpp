#pragma once

#include "isospec/reachability.hpp"
#include "isospec/schedule.hpp"
#include "isospec/synthesis.hpp"
#include "isospec/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace isospec::documents {

using Json = nlohmann::json;

/// Malformed document; `path` addresses the offending field, e.g. `sigma0[2]`.
class DocumentError : public InvalidInput {
 public:
  DocumentError(std::string path, const std::string& what)
      : InvalidInput(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProblemDocument {
  SteeringProblem problem;
  Tolerances tolerances;
  int samples_per_segment = 32;
  double dt = 1e-3;
};

/// Audit fields carried alongside a synthesized schedule.
struct ScheduleAudit {
  double c = 1.0;
  double t_split = 0.0;
  double phase1_min = 0.0;
  double phase2_min = 0.0;
  std::vector<BirkhoffTerm> phase1_terms;
  std::vector<BirkhoffTerm> phase2_terms;
};

struct ScheduleDocument {
  ControlSchedule schedule;
  double horizon = 0.0;
  std::optional<Covariance> sigma0;
  std::optional<Covariance> sigmaT;
  std::optional<ScheduleAudit> audit;
};

Json load_file(const std::string& path);

/// Pretty-printed JSON with every floating value at 17 significant digits.
void write(std::ostream& os, const Json& doc);
std::string dump(const Json& doc);

Eigen::MatrixXd read_matrix(const Json& j, const std::string& path);
Json matrix_to_json(const Eigen::MatrixXd& m);
Json vector_to_json(const Eigen::VectorXd& v);

/// Sets a named tolerance (symmetry, majorization, isotropic, isospectral,
/// determinant, support, time); throws InvalidInput for unknown names.
void set_tolerance(Tolerances& tol, const std::string& name, double value);

ProblemDocument parse_problem(const Json& j);

Json certificate_to_json(const ReachabilityCertificate& cert);

Json schedule_to_json(const ScheduleDocument& doc);
ScheduleDocument parse_schedule(const Json& j);

ScheduleDocument make_schedule_document(const SteeringProblem& problem, const SynthesisResult& result);

}  // namespace isospec::documents
