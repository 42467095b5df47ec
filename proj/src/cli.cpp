#include "isospec/cli.hpp"

#include "isospec/compound.hpp"
#include "isospec/documents.hpp"
#include "isospec/matrix_calculus.hpp"
#include "isospec/reachability.hpp"
#include "isospec/simulation.hpp"
#include "isospec/synthesis.hpp"

#include <CLI11.hpp>
#include <spdlog/logger.h>
#include <spdlog/sinks/ostream_sink.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>

namespace isospec::cli {

namespace {

using documents::Json;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err, true);
  auto log = std::make_shared<spdlog::logger>("isospec", sink);
  log->set_pattern("isospec: [%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ISOSPEC_LOG")) {
    const std::string v = env;
    if (v == "quiet") log->set_level(spdlog::level::off);
    else if (v == "info") log->set_level(spdlog::level::info);
    else if (v == "debug") log->set_level(spdlog::level::debug);
  }
  return log;
}

void apply_tol_overrides(Tolerances& tol, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw InvalidInput("--tol expects name=value, got '" + o + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(o.substr(eq + 1), &used);
      if (used != o.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InvalidInput("--tol: cannot parse value in '" + o + "'");
    }
    documents::set_tolerance(tol, o.substr(0, eq), v);
  }
}

// A matrix file is either a bare nested array or an object with a "matrix" field.
Eigen::MatrixXd load_matrix(const std::string& path) {
  const Json j = documents::load_file(path);
  if (j.is_object()) {
    auto it = j.find("matrix");
    if (it == j.end()) throw documents::DocumentError("matrix", "missing field");
    return documents::read_matrix(*it, "matrix");
  }
  return documents::read_matrix(j, "matrix");
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct Context {
  std::ostream& out;
  spdlog::logger& log;
  std::vector<std::string> tol_overrides;
};

int cmd_certify(Context& ctx, const std::string& input) {
  auto doc = documents::parse_problem(documents::load_file(input));
  apply_tol_overrides(doc.tolerances, ctx.tol_overrides);
  const auto cert = certify(doc.problem, doc.tolerances);
  ctx.log.info("verdict {} ({})", to_string(cert.verdict), to_string(cert.reason));
  documents::write(ctx.out, documents::certificate_to_json(cert));
  switch (cert.verdict) {
    case Verdict::Reachable: return kReachable;
    case Verdict::Unreachable: return kUnreachable;
    case Verdict::Unknown: break;
  }
  return kUnknown;
}

int cmd_synthesize(Context& ctx, const std::string& input, const std::string& out_path) {
  auto doc = documents::parse_problem(documents::load_file(input));
  apply_tol_overrides(doc.tolerances, ctx.tol_overrides);
  const auto& problem = doc.problem;

  const auto cert = certify(problem, doc.tolerances);
  if (cert.verdict != Verdict::Reachable) {
    ctx.log.warn("no schedule: problem is {} ({})", to_string(cert.verdict), to_string(cert.reason));
    Json rejected;
    rejected["kind"] = "synthesis-rejected";
    rejected["certificate"] = documents::certificate_to_json(cert);
    documents::write(ctx.out, rejected);
    return cert.verdict == Verdict::Unreachable ? kUnreachable : kUnknown;
  }

  const auto result = synthesize(problem, doc.tolerances);
  const auto endpoint = schedule_endpoint(problem.sigma0, result.schedule);
  const double endpoint_error = max_abs_diff(endpoint.matrix(), problem.sigmaT.matrix());
  const bool iso = verify_isospectral(result.schedule, problem.spectrum, doc.tolerances.isospectral);
  ctx.log.info("{} segments, endpoint error {:.3e}", result.schedule.segments.size(), endpoint_error);
  if (!iso) ctx.log.warn("synthesized schedule failed the isospectrality check");

  const Json schedule_json = documents::schedule_to_json(documents::make_schedule_document(problem, result));
  if (out_path.empty()) {
    documents::write(ctx.out, schedule_json);
    return kReachable;
  }
  std::ofstream f(out_path);
  if (!f) throw InvalidInput("cannot write " + out_path);
  documents::write(f, schedule_json);

  Json summary;
  summary["kind"] = "synthesis-summary";
  summary["schedule"] = out_path;
  summary["segments"] = result.schedule.segments.size();
  summary["shear_cost"] = shear_cost(result.schedule);
  summary["endpoint_error"] = endpoint_error;
  summary["isospectral"] = iso;
  summary["witness"] = {{"c", result.witness.c}, {"t_split", result.witness.t_split}};
  documents::write(ctx.out, summary);
  return kReachable;
}

struct SimulateOptions {
  std::string schedule_path;
  std::string sigma0_path;
  std::string csv_path;
  std::vector<double> snapshots;
  int samples = 0;
  double dt = 0.0;
};

std::vector<double> default_instants(const documents::ScheduleDocument& doc, double total) {
  if (doc.audit) {
    const double t1 = std::clamp(doc.audit->t_split, 0.0, total);
    const double t2 = std::min(doc.audit->phase2_min, total - t1);
    return {0.0, t1 / 2.0, t1, t1 + t2 / 2.0, total};
  }
  return {0.0, total / 4.0, total / 2.0, 3.0 * total / 4.0, total};
}

int cmd_simulate(Context& ctx, const SimulateOptions& opt) {
  const auto doc = documents::parse_schedule(documents::load_file(opt.schedule_path));
  const auto& schedule = doc.schedule;
  const auto n = schedule.spectrum.n();

  std::optional<Covariance> sigma0 = doc.sigma0;
  if (!opt.sigma0_path.empty()) {
    const Eigen::MatrixXd m = load_matrix(opt.sigma0_path);
    try {
      sigma0 = Covariance(m);
    } catch (const std::exception& e) {
      throw InvalidInput(std::string("--sigma0: ") + e.what());
    }
  }
  if (!sigma0) throw InvalidInput("simulate: no initial covariance (pass --sigma0 or embed sigma0 in the schedule)");
  if (sigma0->n() != n) throw InvalidInput("simulate: sigma0 dimension does not match the schedule");

  Tolerances tol;
  apply_tol_overrides(tol, ctx.tol_overrides);
  const bool iso = verify_isospectral(schedule, schedule.spectrum, tol.isospectral);
  if (!iso) ctx.log.warn("schedule contains a segment whose spectrum differs from the declared one; simulating anyway");

  const int samples = opt.samples > 0 ? opt.samples : 32;
  const auto traj = simulate_schedule(*sigma0, schedule, samples);
  ctx.log.info("{} samples over {} segments", traj.size(), schedule.segments.size());

  if (!opt.csv_path.empty()) {
    std::ofstream f(opt.csv_path);
    if (!f) throw InvalidInput("cannot write " + opt.csv_path);
    write_trajectory_csv(f, traj);
  }

  // Liouville: log det grows at rate 2 tr(A) on every segment.
  double drift = 0.0;
  {
    const double logdet0 = log_eigenvalues(*sigma0).sum();
    double expected = logdet0;
    std::size_t idx = 1;
    for (const auto& seg : schedule.segments) {
      const double rate = 2.0 * seg.generator.matrix().trace();
      const double start = expected;
      for (int j = 1; j <= samples; ++j, ++idx) {
        const double e = start + rate * seg.duration * j / samples;
        drift = std::max(drift, std::abs(std::expm1(log_eigenvalues(traj.covariances[idx]).sum() - e)));
      }
      expected = start + rate * seg.duration;
    }
  }

  const auto norm = audit_norm_growth(traj, schedule.spectrum);
  const double total = schedule.total_duration();
  const auto instants = opt.snapshots.empty() ? default_instants(doc, total) : opt.snapshots;
  for (double t : instants)
    if (t < 0.0 || t > total + 1e-12) ctx.log.warn("snapshot t = {} lies outside [0, {}]", t, total);

  Json report;
  report["kind"] = "simulation";
  report["samples"] = traj.size();
  report["duration"] = total;
  report["endpoint"] = documents::matrix_to_json(traj.covariances.back().matrix());
  if (doc.sigmaT) report["endpoint_error"] = max_abs_diff(traj.covariances.back().matrix(), doc.sigmaT->matrix());
  report["determinant_drift"] = drift;
  report["norm_growth"] = {{"passed", norm.passed},
                           {"worst_excess", norm.worst_excess},
                           {"worst_top_equality", norm.worst_top_equality}};
  report["isospectral"] = iso;
  Json snaps = Json::array();
  for (const auto& s : snapshots(*sigma0, schedule, instants))
    snaps.push_back({{"t", s.t}, {"eigenvalues", documents::vector_to_json(s.eigenvalues)}});
  report["snapshots"] = snaps;

  if (opt.dt > 0.0) {
    const auto rk = simulate_rk4(*sigma0, schedule, opt.dt);
    report["rk4"] = {{"dt", opt.dt},
                     {"endpoint_error", max_abs_diff(rk.covariances.back().matrix(),
                                                     traj.covariances.back().matrix())}};
  }
  if (!opt.csv_path.empty()) report["csv"] = opt.csv_path;
  documents::write(ctx.out, report);
  return 0;
}

int cmd_mintime(Context& ctx, const std::string& input) {
  auto doc = documents::parse_problem(documents::load_file(input));
  apply_tol_overrides(doc.tolerances, ctx.tol_overrides);
  const auto& p = doc.problem;
  const auto times = through_identity_times(p.sigma0, p.sigmaT, p.spectrum, doc.tolerances);
  const double t_min = min_through_identity_time(p.sigma0, p.sigmaT, p.spectrum, doc.tolerances);

  Json report;
  report["kind"] = "mintime";
  report["route"] = "through-identity";
  report["t_min"] = t_min;
  report["c"] = times.c;
  report["phase1"] = {{"duration", times.phase1}, {"binding_prefix", times.binding1}};
  report["phase2"] = {{"duration", times.phase2}, {"binding_prefix", times.binding2}};
  report["horizon"] = p.horizon;
  report["horizon_sufficient"] = t_min <= p.horizon + doc.tolerances.time;
  documents::write(ctx.out, report);
  return 0;
}

int cmd_compound(Context& ctx, const std::string& input, int k, bool additive) {
  const Eigen::MatrixXd m = load_matrix(input);
  const CompoundMatrix c = additive ? additive_compound(m, k) : multiplicative_compound(m, k);
  Json labels = Json::array();
  for (Eigen::Index i = 0; i < c.basis.size(); ++i) labels.push_back(c.basis.label(i));
  Json report;
  report["kind"] = "compound";
  report["type"] = additive ? "additive" : "multiplicative";
  report["k"] = k;
  report["labels"] = labels;
  report["matrix"] = documents::matrix_to_json(c.entries);
  documents::write(ctx.out, report);
  return 0;
}

int cmd_cost(Context& ctx, const std::string& input) {
  const auto doc = documents::parse_schedule(documents::load_file(input));
  Json report;
  report["kind"] = "cost";
  report["cost"] = shear_cost(doc.schedule);
  report["duration"] = doc.schedule.total_duration();
  documents::write(ctx.out, report);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);

  CLI::App app{"Covariance steering under isospectral gains", "isospec"};
  app.require_subcommand(1);
  std::vector<std::string> tols;
  app.add_option("--tol", tols, "Override a tolerance, name=value (repeatable)")->take_all();

  std::string input;
  std::string out_path;

  auto* certify_cmd = app.add_subcommand("certify", "Reachability certificate for a problem file");
  certify_cmd->add_option("problem", input, "Problem document")->required();

  auto* synth_cmd = app.add_subcommand("synthesize", "Build an isospectral schedule for a problem file");
  synth_cmd->add_option("problem", input, "Problem document")->required();
  synth_cmd->add_option("--out", out_path, "Write the schedule document here and print a summary");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Propagate a covariance under a schedule");
  sim_cmd->add_option("schedule", sim.schedule_path, "Schedule document")->required();
  sim_cmd->add_option("--sigma0", sim.sigma0_path, "Initial covariance matrix file (default: the schedule's)");
  sim_cmd->add_option("--csv", sim.csv_path, "Trajectory CSV output");
  sim_cmd->add_option("--snapshots", sim.snapshots, "Comma-separated snapshot instants")->delimiter(',');
  sim_cmd->add_option("--samples-per-segment", sim.samples, "Samples per segment")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--dt", sim.dt, "Also integrate with RK4 at this step and report the discrepancy")
      ->check(CLI::PositiveNumber);

  auto* mintime_cmd = app.add_subcommand("mintime", "Shortest horizon for the through-identity route");
  mintime_cmd->add_option("problem", input, "Problem document")->required();

  int k = 0;
  bool additive = false;
  bool multiplicative = false;
  auto* compound_cmd = app.add_subcommand("compound", "Additive or multiplicative compound of a matrix");
  compound_cmd->add_option("matrix", input, "Matrix file")->required();
  compound_cmd->add_option("--k", k, "Order")->required();
  auto* add_flag = compound_cmd->add_flag("--additive", additive);
  auto* mul_flag = compound_cmd->add_flag("--multiplicative", multiplicative);
  add_flag->excludes(mul_flag);

  auto* cost_cmd = app.add_subcommand("cost", "Shear cost of a schedule");
  cost_cmd->add_option("schedule", input, "Schedule document")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kInputError;
  }

  Context ctx{out, *log, tols};
  try {
    if (*certify_cmd) return cmd_certify(ctx, input);
    if (*synth_cmd) return cmd_synthesize(ctx, input, out_path);
    if (*sim_cmd) return cmd_simulate(ctx, sim);
    if (*mintime_cmd) return cmd_mintime(ctx, input);
    if (*compound_cmd) {
      if (additive == multiplicative) throw InvalidInput("compound: pass exactly one of --additive, --multiplicative");
      return cmd_compound(ctx, input, k, additive);
    }
    if (*cost_cmd) return cmd_cost(ctx, input);
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    log->flush();
    return kInputError;
  }
  return kInputError;
}

}  // namespace isospec::cli
