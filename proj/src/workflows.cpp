#include "paraxial/workflows.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>
#include <json.hpp>
#include <thread>

#include "paraxial/format.hpp"
#include "paraxial/io.hpp"

namespace paraxial {
namespace {

using nlohmann::json;

// Mirrors the recording schedule of split_step_propagate.
std::vector<double> recording_points(double u_span, const GridSpec& grid, const std::vector<double>& snapshots) {
  const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(u_span / grid.du - 1e-9)));
  const double du = u_span / static_cast<double>(steps);
  std::vector<long long> snap;
  for (double u : snapshots) snap.push_back(std::llround(u / du));
  std::sort(snap.begin(), snap.end());
  std::vector<double> out{0.0};
  for (long long s = 1; s <= steps; ++s) {
    if (s == steps) {
      out.push_back(u_span);
    } else if (s % grid.record_stride == 0 || std::binary_search(snap.begin(), snap.end(), s)) {
      out.push_back(du * static_cast<double>(s));
    }
  }
  return out;
}

json number(double x) {
  // NaN and infinities have no JSON literal; they are emitted as strings.
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json params_json(const ParaxialParams& p) {
  return {{"k", number(p.k)},
          {"epsilon", p.epsilon},
          {"gamma", number(p.gamma)},
          {"alpha", p.alpha.to_string()},
          {"axis", p.axis == AxisLabel::z_axis ? "z" : "tau"}};
}

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) {
    out.push_back(
        {{"name", c.name}, {"value", number(c.value)}, {"tolerance", number(c.tolerance)}, {"passed", c.passed}});
  }
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Check make_check(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value <= tolerance};
}

json diagnostics_json(const PropagationDiagnostics& d) {
  json out{{"norm_drift", number(d.norm_drift)},
           {"max_step_norm_drift", number(d.max_step_norm_drift)},
           {"mi4_drift", number(d.mi4_drift)},
           {"max_boundary_ratio", number(d.max_boundary_ratio)},
           {"steps", d.steps},
           {"du", number(d.du)}};
  out["energy_drift"] = d.energy_drift ? number(*d.energy_drift) : json(nullptr);
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::string indexed_name(const char* prefix, std::size_t i, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%04zu%s", prefix, i, suffix);
  return buf;
}

std::vector<Check> propagation_checks(const PropagationRecord& record, const ChecksSection& tol) {
  return {make_check("mi4_drift", record.diagnostics.mi4_drift, tol.mi4_rel_tol),
          make_check("norm_drift", record.diagnostics.norm_drift, 1e-9)};
}

RunOutcome write_propagate(const RunConfig& cfg, const PropagateResult& result, const std::filesystem::path& out) {
  const ParaxialParams params = resolve_params(cfg);
  const auto& record = result.record;
  write_file_atomic(out / "trajectory.csv", trajectory_csv(record.trajectory, params));
  json snaps = json::array();
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    const auto name = indexed_name("field_", i, ".bin");
    write_field_binary(out / name, record.snapshots[i].field, record.snapshots[i].u);
    snaps.push_back({{"file", name}, {"u", number(record.snapshots[i].u)}});
  }
  json report{{"workflow", "propagate"},
              {"params", params_json(params)},
              {"diagnostics", diagnostics_json(record.diagnostics)},
              {"invariants",
               {{"mi4_initial", number(record.trajectory.front().mi4)},
                {"mi4_final", number(record.trajectory.back().mi4)}}},
              {"snapshots", snaps},
              {"checks", checks_json(result.checks)},
              {"passed", all_passed(result.checks)}};
  report["paraxiality_ratio"] = result.paraxiality ? number(*result.paraxiality) : json(nullptr);
  write_json(out / "report.json", report);
  return {all_passed(result.checks), std::nullopt};
}

std::string abcd_csv(const std::vector<AbcdSample>& rows) {
  std::string out = "u,A,B,C,D,w2,invR\n";
  for (const auto& r : rows) {
    for (double v : {r.u, r.matrix.a(), r.matrix.b(), r.matrix.c(), r.matrix.d(), r.w2}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(r.inv_R);
    out += '\n';
  }
  return out;
}

RunOutcome write_predict(const RunConfig& cfg, const PredictResult& result, const std::filesystem::path& out) {
  const ParaxialParams params = resolve_params(cfg);
  write_file_atomic(out / "trajectory.csv", trajectory_csv(result.trajectory, params));
  write_file_atomic(out / "abcd.csv", abcd_csv(result.abcd));
  const auto& last = result.abcd.back();
  json report{{"workflow", "predict"},
              {"params", params_json(params)},
              {"invariants", {{"mi4", number(result.mi4)}}},
              {"final", {{"u", number(last.u)}, {"w2", number(last.w2)}, {"invR", number(last.inv_R)}}},
              {"checks", json::array()},
              {"passed", true}};
  write_json(out / "report.json", report);
  return {true, std::nullopt};
}

RunOutcome write_compare(const RunConfig& cfg, const ComparisonReport& rep, const std::filesystem::path& out) {
  const ParaxialParams params = resolve_params(cfg);
  write_file_atomic(out / "trajectory.csv", trajectory_csv(rep.record.trajectory, params));
  std::string csv = "u,w2_numeric,w2_analytic,MI4,rel_err\n";
  for (std::size_t i = 0; i < rep.u.size(); ++i) {
    csv += format_double(rep.u[i]) + ',' + format_double(rep.w2_numeric[i]) + ',' +
           format_double(rep.w2_analytic[i]) + ',' + format_double(rep.mi4[i]) + ',' +
           format_double(rep.rel_err[i]) + '\n';
  }
  write_file_atomic(out / "compare.csv", csv);
  json report{{"workflow", "compare"},
              {"params", params_json(params)},
              {"diagnostics", diagnostics_json(rep.record.diagnostics)},
              {"summary", {{"max_rel_err", number(rep.max_rel_err)}, {"max_mi4_drift", number(rep.max_mi4_drift)}}},
              {"checks", checks_json(rep.checks)},
              {"passed", all_passed(rep.checks)}};
  write_json(out / "report.json", report);
  return {all_passed(rep.checks), std::nullopt};
}

RunOutcome write_tof(const RunConfig& cfg, const TofAnalysis& a, const std::filesystem::path& out) {
  json report{{"workflow", "analyze-tof"},
              {"params", params_json(resolve_params(cfg))},
              {"slope", number(a.slope)},
              {"kinetic_plus_interaction", number(a.kinetic_plus_interaction)},
              {"dv2_free", number(a.dv2_free)},
              {"dv2_corrected", number(a.dv2_corrected)},
              {"interaction_ratio", number(a.interaction_ratio)},
              {"overestimation", number(a.overestimation)},
              {"residual_rms", number(a.residual_rms)},
              {"checks", json::array()},
              {"passed", true}};
  write_json(out / "report.json", report);
  return {true, std::nullopt};
}

}  // namespace

PropagateResult run_propagate(const RunConfig& cfg) {
  const ParaxialParams params = resolve_params(cfg);
  const TransverseField field = initial_field(cfg);
  SolverOptions options;
  options.snapshot_u = cfg.run.snapshots;
  PropagateResult result{split_step_propagate(field, params, cfg.grid, cfg.run.u_span, options), {}, std::nullopt};
  result.checks = propagation_checks(result.record, cfg.checks);
  if (const auto* atomic = std::get_if<AtomicBeamSpec>(&cfg.medium); atomic && atomic->energy) {
    const double p = std::sqrt(2.0 * atomic->mass * *atomic->energy);
    result.paraxiality = paraxiality_ratio(result.record.trajectory.front().moments.K, atomic->hbar, p);
  }
  return result;
}

std::vector<RayMatrix> matrices_along(const Profile& alpha, const std::vector<double>& u_values, double step) {
  std::vector<RayMatrix> out;
  out.reserve(u_values.size());
  RayMatrix m = RayMatrix::identity();
  for (std::size_t i = 0; i < u_values.size(); ++i) {
    if (i > 0 && u_values[i] > u_values[i - 1]) {
      m = compose(matrix_ode(alpha, u_values[i - 1], u_values[i], step), m);
    }
    out.push_back(m);
  }
  return out;
}

PredictResult run_predict(const RunConfig& cfg) {
  const ParaxialParams params = resolve_params(cfg);
  const MomentSet m0 = compute_moments(initial_field(cfg), params, 0.0);
  PredictResult result;
  result.mi4 = quality_factor(m0, params.epsilon);

  const double steps = std::ceil(cfg.run.u_span / cfg.run.ode_step - 1e-9);
  const int stride = std::max(1, static_cast<int>(steps / 200.0));
  result.trajectory = moment_ode_solve(m0, params, 0.0, cfg.run.u_span, cfg.run.ode_step, stride);

  const auto u = result.trajectory.u_values();
  const auto matrices = matrices_along(params.alpha, u, cfg.run.ode_step);
  const InverseCurvature q0 = q_from_moments(m0, result.mi4, params.k, params.epsilon);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const InverseCurvature q = propagate_q(q0, matrices[i]);
    result.abcd.push_back({u[i], matrices[i], q.width_squared(result.mi4, params.k), q.inv_R()});
  }
  return result;
}

ComparisonReport run_compare(const RunConfig& cfg) {
  const ParaxialParams params = resolve_params(cfg);
  const TransverseField field = initial_field(cfg);
  const MomentSet m0 = compute_moments(field, params, 0.0);
  const double mi4_0 = quality_factor(m0, params.epsilon);
  const InverseCurvature q0 = q_from_moments(m0, mi4_0, params.k, params.epsilon);

  const auto u_grid = recording_points(cfg.run.u_span, cfg.grid, cfg.run.snapshots);
  auto analytic = std::async(std::launch::async, [&] {
    std::vector<double> w2;
    for (const RayMatrix& m : matrices_along(params.alpha, u_grid, cfg.run.ode_step)) {
      w2.push_back(propagate_q(q0, m).width_squared(mi4_0, params.k));
    }
    return w2;
  });

  SolverOptions options;
  options.snapshot_u = cfg.run.snapshots;
  ComparisonReport rep;
  try {
    rep.record = split_step_propagate(field, params, cfg.grid, cfg.run.u_span, options);
  } catch (...) {
    analytic.wait();
    throw;
  }
  const auto w2_analytic = analytic.get();

  const auto& traj = rep.record.trajectory;
  require(traj.size() == u_grid.size(), ErrorKind::invariant_violation, "recording grids disagree");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj[i];
    require(std::abs(s.u - u_grid[i]) <= 1e-12 * std::max(1.0, cfg.run.u_span), ErrorKind::invariant_violation,
            "recording grids disagree");
    const double err = std::abs(s.moments.r2 - w2_analytic[i]) / std::abs(w2_analytic[i]);
    require(std::isfinite(err), ErrorKind::invariant_violation, "non-finite width error");
    rep.u.push_back(s.u);
    rep.w2_numeric.push_back(s.moments.r2);
    rep.w2_analytic.push_back(w2_analytic[i]);
    rep.mi4.push_back(s.mi4);
    rep.rel_err.push_back(err);
    rep.max_rel_err = std::max(rep.max_rel_err, err);
  }
  rep.max_mi4_drift = traj.max_relative_mi4_drift();
  rep.checks = {make_check("w2_rel_err", rep.max_rel_err, cfg.checks.w2_rel_tol),
                make_check("mi4_drift", rep.max_mi4_drift, cfg.checks.mi4_rel_tol)};
  return rep;
}

TofAnalysis run_tof(const RunConfig& cfg, const std::vector<double>& tau, const std::vector<double>& w2) {
  require(tau.size() == w2.size(), ErrorKind::parameter, "need one width per time of flight");
  require(tau.size() >= 2, ErrorKind::degenerate_beam, "need w^2(0) and at least one later width");
  require(tau.front() == 0.0, ErrorKind::parameter, "the first sample must be at tau = 0");
  for (std::size_t i = 1; i < tau.size(); ++i) {
    require(tau[i] != 0.0, ErrorKind::degenerate_beam, "time of flight 0 after the reference sample");
    require(tau[i] > tau[i - 1], ErrorKind::parameter, "times of flight must increase");
  }
  const ParaxialParams params = resolve_params(cfg);
  require(params.epsilon == 1, ErrorKind::precondition, "time-of-flight analysis needs an atomic mapping");
  const MomentSet m0 = compute_moments(initial_field(cfg), params, 0.0);
  require(m0.K > 0.0, ErrorKind::degenerate_beam, "initial kinetic moment is zero");

  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i < tau.size(); ++i) {
    const double t2 = tau[i] * tau[i];
    num += t2 * (w2[i] - w2[0]);
    den += t2 * t2;
  }
  TofAnalysis a;
  a.slope = num / den;
  const double k2 = params.k * params.k;
  a.kinetic_plus_interaction = a.slope * k2 / 2.0;
  a.dv2_free = a.slope / 2.0;
  a.interaction_ratio = velocity_dispersion_error(m0);
  a.dv2_corrected = a.dv2_free - m0.V / k2;
  a.overestimation = a.dv2_free / a.dv2_corrected;
  double ss = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double r = w2[i] - (w2[0] + a.slope * tau[i] * tau[i]);
    ss += r * r;
  }
  a.residual_rms = std::sqrt(ss / static_cast<double>(tau.size()));
  return a;
}

RunOutcome execute_workflow(const RunConfig& cfg, Workflow workflow, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file_atomic(out_dir / "config.echo.ini", echo_config(cfg));
  switch (workflow) {
    case Workflow::propagate: return write_propagate(cfg, run_propagate(cfg), out_dir);
    case Workflow::predict: return write_predict(cfg, run_predict(cfg), out_dir);
    case Workflow::compare: return write_compare(cfg, run_compare(cfg), out_dir);
    case Workflow::analyze_tof: {
      require(cfg.tof.has_value(), ErrorKind::config, "analyze-tof needs a [tof] section");
      return write_tof(cfg, run_tof(cfg, cfg.tof->tau, cfg.tof->w2), out_dir);
    }
    case Workflow::sweep: fail(ErrorKind::config, "sweep is driven by run_sweep");
  }
  fail(ErrorKind::config, "unknown workflow");
}

RunOutcome run_sweep(const std::filesystem::path& config_path, const ConfigOverrides& overrides,
                     const std::filesystem::path& out_dir, int threads) {
  const RunConfig base = parse_config(config_path, overrides);
  require(base.sweep.has_value(), ErrorKind::config, "sweep needs a [sweep] section");
  const SweepSection sweep = *base.sweep;
  std::filesystem::create_directories(out_dir);

  struct PointResult {
    bool passed = false;
    std::optional<ErrorKind> error;
    std::string message;
  };
  std::vector<PointResult> results(sweep.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sweep.values.size(); i = next++) {
      ConfigOverrides point = overrides;
      point.emplace_back(sweep.parameter, format_double(sweep.values[i]));
      try {
        const RunConfig cfg = parse_config(config_path, point);
        results[i].passed = execute_workflow(cfg, sweep.workflow, out_dir / indexed_name("point_", i, "")).passed;
      } catch (const Error& e) {
        results[i].error = e.kind();
        results[i].message = e.what();
      } catch (const std::exception& e) {
        results[i].error = ErrorKind::io;
        results[i].message = e.what();
      }
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, sweep.values.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunOutcome outcome;
  json points = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    json p{{"index", i}, {"value", number(sweep.values[i])}, {"dir", indexed_name("point_", i, "")}};
    if (r.error) {
      p["status"] = "error";
      p["error"] = std::string(to_string(*r.error));
      p["message"] = r.message;
      if (!outcome.failure) outcome.failure = r.error;
      outcome.passed = false;
    } else {
      p["status"] = r.passed ? "passed" : "failed";
      outcome.passed = outcome.passed && r.passed;
    }
    points.push_back(p);
  }
  write_json(out_dir / "index.json", {{"parameter", sweep.parameter},
                                      {"workflow", std::string(to_string(sweep.workflow))},
                                      {"points", points},
                                      {"passed", outcome.passed}});
  return outcome;
}

}  // namespace paraxial
