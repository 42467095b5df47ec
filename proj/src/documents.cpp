#include "isospec/documents.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace isospec::documents {

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_flat(const Json& j) {
  for (const auto& e : j)
    if (e.is_array() || e.is_object()) return false;
  return true;
}

void write_value(std::ostream& os, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      break;
    case Json::value_t::array:
      if (j.empty()) {
        os << "[]";
      } else if (is_flat(j)) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_value(os, j[i], depth + 1);
        }
        os << "]";
      } else {
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
          os << pad;
          write_value(os, j[i], depth + 1);
          os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << close_pad << "]";
      }
      break;
    case Json::value_t::object:
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      {
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
          os << pad << Json(it.key()).dump() << ": ";
          write_value(os, it.value(), depth + 1);
          os << (i + 1 < j.size() ? ",\n" : "\n");
        }
      }
      os << close_pad << "}";
      break;
    default:
      os << j.dump();
  }
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw DocumentError(path.empty() ? "<root>" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw DocumentError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double read_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw DocumentError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw DocumentError(path, "number must be finite");
  return v;
}

Eigen::VectorXd read_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw DocumentError(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = read_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

template <typename T, typename F>
T wrap(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const DocumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw DocumentError(path, e.what());
  }
}

Covariance read_covariance(const Json& j, const std::string& path, Eigen::Index n) {
  const Eigen::MatrixXd m = read_matrix(j, path);
  if (n > 0 && m.rows() != n) throw DocumentError(path, "expected " + std::to_string(n) + " rows");
  return wrap<Covariance>(path, [&] { return Covariance(m); });
}

Json terms_to_json(const std::vector<BirkhoffTerm>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) {
    Json perm = Json::array();
    for (int p : t.permutation) perm.push_back(p + 1);
    out.push_back({{"weight", t.weight}, {"permutation", perm}});
  }
  return out;
}

std::vector<BirkhoffTerm> terms_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw DocumentError(path, "expected an array");
  std::vector<BirkhoffTerm> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    BirkhoffTerm t;
    t.weight = read_number(field(j[i], "weight", p), join(p, "weight"));
    const Eigen::VectorXd perm = read_vector(field(j[i], "permutation", p), join(p, "permutation"));
    for (Eigen::Index k = 0; k < perm.size(); ++k) t.permutation.push_back(static_cast<int>(perm(k)) - 1);
    if (!is_permutation(t.permutation)) throw DocumentError(join(p, "permutation"), "not a permutation");
    out.push_back(std::move(t));
  }
  return out;
}

Json audit_to_json(const MajorizationAudit& audit) {
  Json rows = Json::array();
  for (const auto& r : audit.rows) rows.push_back({{"k", r.k}, {"lhs", r.lhs}, {"rhs", r.rhs}});
  return {{"holds", audit.holds}, {"tol", audit.tol}, {"prefix_sums", rows}};
}

}  // namespace

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write(std::ostream& os, const Json& doc) {
  write_value(os, doc, 0);
  os << "\n";
}

std::string dump(const Json& doc) {
  std::ostringstream os;
  write(os, doc);
  return os.str();
}

Eigen::MatrixXd read_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw DocumentError(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw DocumentError(path + "[0]", "expected a row array");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) throw DocumentError(rp, "expected a row array");
    if (j[i].size() != cols)
      throw DocumentError(rp, "row has " + std::to_string(j[i].size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          read_number(j[i][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    out.push_back(row);
  }
  return out;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void set_tolerance(Tolerances& tol, const std::string& name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw InvalidInput("tolerance " + name + " must be positive");
  if (name == "symmetry") tol.symmetry = value;
  else if (name == "majorization") tol.majorization = value;
  else if (name == "isotropic") tol.isotropic = value;
  else if (name == "isospectral") tol.isospectral = value;
  else if (name == "determinant") tol.determinant = value;
  else if (name == "support") tol.support = value;
  else if (name == "time") tol.time = value;
  else throw InvalidInput("unknown tolerance '" + name + "'");
}

ProblemDocument parse_problem(const Json& j) {
  ProblemDocument doc;
  const Json& nj = field(j, "n", "");
  if (!nj.is_number_integer() || nj.get<long>() < 1) throw DocumentError("n", "expected a positive integer");
  const auto n = static_cast<Eigen::Index>(nj.get<long>());

  const Covariance sigma0 = read_covariance(field(j, "sigma0", ""), "sigma0", n);
  const Covariance sigmaT = read_covariance(field(j, "sigmaT", ""), "sigmaT", n);
  const Eigen::VectorXd d = read_vector(field(j, "spectrum", ""), "spectrum");
  if (d.size() != n) throw DocumentError("spectrum", "expected " + std::to_string(n) + " values");
  const double horizon = read_number(field(j, "horizon", ""), "horizon");
  if (!(horizon > 0.0)) throw DocumentError("horizon", "must be positive");
  doc.problem = SteeringProblem(sigma0, sigmaT, Spectrum(d), horizon);

  if (auto it = j.find("options"); it != j.end()) {
    const Json& opts = *it;
    if (!opts.is_object()) throw DocumentError("options", "expected an object");
    for (auto o = opts.begin(); o != opts.end(); ++o) {
      const std::string p = "options." + o.key();
      if (o.key() == "samples_per_segment") {
        if (!o->is_number_integer() || o->get<long>() < 1) throw DocumentError(p, "expected a positive integer");
        doc.samples_per_segment = static_cast<int>(o->get<long>());
      } else if (o.key() == "dt") {
        doc.dt = read_number(*o, p);
        if (!(doc.dt > 0.0)) throw DocumentError(p, "must be positive");
      } else if (o.key() == "tolerances") {
        if (!o->is_object()) throw DocumentError(p, "expected an object");
        for (auto t = o->begin(); t != o->end(); ++t) {
          const std::string tp = p + "." + t.key();
          const double v = read_number(*t, tp);
          wrap<int>(tp, [&] {
            set_tolerance(doc.tolerances, t.key(), v);
            return 0;
          });
        }
      } else {
        throw DocumentError(p, "unknown option");
      }
    }
  }
  return doc;
}

Json certificate_to_json(const ReachabilityCertificate& cert) {
  Json out;
  out["kind"] = "certificate";
  out["verdict"] = to_string(cert.verdict);
  out["reason"] = to_string(cert.reason);
  if (cert.witness)
    out["witness"] = {{"c", cert.witness->c},
                      {"t_split", cert.witness->t_split},
                      {"binding_prefix", cert.witness->binding_prefix}};
  else
    out["witness"] = nullptr;
  out["audit"] = {{"forward", audit_to_json(cert.forward)}, {"reverse", audit_to_json(cert.reverse)}};
  return out;
}

Json schedule_to_json(const ScheduleDocument& doc) {
  Json out;
  out["kind"] = "schedule";
  out["n"] = doc.schedule.spectrum.n();
  out["spectrum"] = vector_to_json(doc.schedule.spectrum.vector());
  out["horizon"] = doc.horizon;
  if (doc.sigma0) out["sigma0"] = matrix_to_json(doc.sigma0->matrix());
  if (doc.sigmaT) out["sigmaT"] = matrix_to_json(doc.sigmaT->matrix());
  Json segs = Json::array();
  for (const auto& s : doc.schedule.segments)
    segs.push_back({{"duration", s.duration}, {"generator", matrix_to_json(s.generator.matrix())}});
  out["segments"] = segs;
  if (doc.audit) {
    out["audit"] = {{"c", doc.audit->c},
                    {"t_split", doc.audit->t_split},
                    {"phase_min_durations", {doc.audit->phase1_min, doc.audit->phase2_min}},
                    {"birkhoff", {{"phase1", terms_to_json(doc.audit->phase1_terms)},
                                  {"phase2", terms_to_json(doc.audit->phase2_terms)}}}};
  }
  return out;
}

ScheduleDocument parse_schedule(const Json& j) {
  ScheduleDocument doc;
  const Eigen::VectorXd d = read_vector(field(j, "spectrum", ""), "spectrum");
  if (d.size() == 0) throw DocumentError("spectrum", "must be non-empty");
  doc.schedule.spectrum = Spectrum(d);
  const auto n = d.size();

  const Json& segs = field(j, "segments", "");
  if (!segs.is_array()) throw DocumentError("segments", "expected an array");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = "segments[" + std::to_string(i) + "]";
    const double duration = read_number(field(segs[i], "duration", p), join(p, "duration"));
    const Eigen::MatrixXd g = read_matrix(field(segs[i], "generator", p), join(p, "generator"));
    if (g.rows() != n || g.cols() != n)
      throw DocumentError(join(p, "generator"), "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    doc.schedule.segments.push_back(
        wrap<ControlSegment>(p, [&] { return ControlSegment(duration, SymmetricMatrix(g, 1e-10)); }));
  }
  doc.horizon = doc.schedule.total_duration();
  if (auto it = j.find("horizon"); it != j.end()) doc.horizon = read_number(*it, "horizon");
  if (auto it = j.find("sigma0"); it != j.end()) doc.sigma0 = read_covariance(*it, "sigma0", n);
  if (auto it = j.find("sigmaT"); it != j.end()) doc.sigmaT = read_covariance(*it, "sigmaT", n);
  if (auto it = j.find("audit"); it != j.end()) {
    const Json& a = *it;
    ScheduleAudit audit;
    audit.c = read_number(field(a, "c", "audit"), "audit.c");
    audit.t_split = read_number(field(a, "t_split", "audit"), "audit.t_split");
    const Eigen::VectorXd mins = read_vector(field(a, "phase_min_durations", "audit"), "audit.phase_min_durations");
    if (mins.size() != 2) throw DocumentError("audit.phase_min_durations", "expected two values");
    audit.phase1_min = mins(0);
    audit.phase2_min = mins(1);
    const Json& b = field(a, "birkhoff", "audit");
    audit.phase1_terms = terms_from_json(field(b, "phase1", "audit.birkhoff"), "audit.birkhoff.phase1");
    audit.phase2_terms = terms_from_json(field(b, "phase2", "audit.birkhoff"), "audit.birkhoff.phase2");
    doc.audit = std::move(audit);
  }
  return doc;
}

ScheduleDocument make_schedule_document(const SteeringProblem& problem, const SynthesisResult& result) {
  ScheduleDocument doc;
  doc.schedule = result.schedule;
  doc.horizon = problem.horizon;
  doc.sigma0 = problem.sigma0;
  doc.sigmaT = problem.sigmaT;
  doc.audit = ScheduleAudit{result.witness.c, result.witness.t_split, result.phase1_min, result.phase2_min,
                            result.phase1.terms, result.phase2.terms};
  return doc;
}

}  // namespace isospec::documents
