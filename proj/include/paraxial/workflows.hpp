#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "paraxial/abcd.hpp"
#include "paraxial/config.hpp"
#include "paraxial/error.hpp"
#include "paraxial/moments.hpp"
#include "paraxial/solver.hpp"

namespace paraxial {

/// Named pass/fail check recorded in report.json.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct PropagateResult {
  PropagationRecord record;
  std::vector<Check> checks;
  /// hbar sqrt(<K>) / p for atomic specs that carry a longitudinal energy.
  std::optional<double> paraxiality;
};

PropagateResult run_propagate(const RunConfig& cfg);

struct AbcdSample {
  double u = 0.0;
  RayMatrix matrix = RayMatrix::identity();
  /// <r^2> and 1/R obtained from the propagated complex curvature.
  double w2 = 0.0;
  double inv_R = 0.0;
};

struct PredictResult {
  MomentTrajectory trajectory;
  std::vector<AbcdSample> abcd;
  double mi4 = 0.0;
};

/// Moment ODE plus the q-law from the initial moments, evaluated on the
/// solver's recording grid.
PredictResult run_predict(const RunConfig& cfg);

/// Numeric vs analytic <r^2>. w2_* columns hold <r^2> about the origin, the
/// quantity the q-law transports.
struct ComparisonReport {
  std::vector<double> u;
  std::vector<double> w2_numeric;
  std::vector<double> w2_analytic;
  std::vector<double> mi4;
  std::vector<double> rel_err;
  double max_rel_err = 0.0;
  double max_mi4_drift = 0.0;
  PropagationRecord record;
  std::vector<Check> checks;
};

ComparisonReport run_compare(const RunConfig& cfg);

/// Accumulated ray matrices from u_values.front() to each entry (increasing).
std::vector<RayMatrix> matrices_along(const Profile& alpha, const std::vector<double>& u_values, double step);

struct TofAnalysis {
  /// Least-squares slope of w^2(tau) - w^2(0) against tau^2.
  double slope = 0.0;
  /// slope k^2 / 2 = K0 + V0.
  double kinetic_plus_interaction = 0.0;
  double dv2_free = 0.0;
  double dv2_corrected = 0.0;
  /// V0 / K0 of the configured initial beam.
  double interaction_ratio = 0.0;
  /// dv2_free / dv2_corrected.
  double overestimation = 0.0;
  double residual_rms = 0.0;
};

/// Velocity-dispersion analysis of measured centered widths. The first sample
/// must be at tau = 0 and later ones at distinct positive tau; tau = 0 past
/// the first sample is a degenerate_beam error.
TofAnalysis run_tof(const RunConfig& cfg, const std::vector<double>& tau, const std::vector<double>& w2);

struct RunOutcome {
  /// False when a check exceeded its tolerance.
  bool passed = true;
  /// Set by run_sweep when a point raised an error; the first one wins.
  std::optional<ErrorKind> failure;
};

/// Runs one workflow and writes its files into out_dir (created if needed).
RunOutcome execute_workflow(const RunConfig& cfg, Workflow workflow, const std::filesystem::path& out_dir);

/// Re-parses config_path once per sweep value with the swept key overridden
/// and runs the points on `threads` workers. Writes point_XXXX/ directories
/// and index.json. Point failures are recorded in the index; the returned
/// outcome fails if any point failed or missed a check.
RunOutcome run_sweep(const std::filesystem::path& config_path, const ConfigOverrides& overrides,
                     const std::filesystem::path& out_dir, int threads);

}  // namespace paraxial
