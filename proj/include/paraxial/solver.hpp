#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "paraxial/core.hpp"
#include "paraxial/field.hpp"
#include "paraxial/moments.hpp"

namespace paraxial {

struct GaussianBeam {
  double sigma = 1.0;
  std::array<double, 2> centroid{0.0, 0.0};
  /// Transverse wavevector of a linear tilt phase exp(i p . r).
  std::array<double, 2> tilt{0.0, 0.0};
  /// Curvature radius R of the phase exp(i eps k |r - r0|^2 / 2R), so that R > 0
  /// is a diverging beam in either convention; infinity for a flat phase.
  double curvature_radius = std::numeric_limits<double>::infinity();

  bool operator==(const GaussianBeam&) const = default;
};

/// psi ~ exp(-|r-r0|^2 / 2 sigma^2 + i eps k |r-r0|^2 / 2R + i p.r), normalized on the grid.
/// Throws grid_too_coarse if sigma < 4 dx and grid_too_small if extent < 8 sigma.
TransverseField make_gaussian(const GaussianBeam& beam, const GridSpec& grid, double k, int epsilon = 1);

struct Snapshot {
  double u = 0.0;
  TransverseField field;
};

struct PropagationDiagnostics {
  /// max |norm(u) - norm(0)| over the run.
  double norm_drift = 0.0;
  /// max |norm after a step - norm before it|.
  double max_step_norm_drift = 0.0;
  /// Relative drift of <H> = eps K + V + eps U; only tracked for constant alpha.
  std::optional<double> energy_drift;
  double mi4_drift = 0.0;
  double max_boundary_ratio = 0.0;
  long long steps = 0;
  double du = 0.0;
};

struct PropagationRecord {
  MomentTrajectory trajectory;
  std::vector<Snapshot> snapshots;
  PropagationDiagnostics diagnostics;
  TransverseField final_field{4, 1.0};
};

struct SolverOptions {
  /// Fields are stored at the step boundaries closest to these u values.
  std::vector<double> snapshot_u;
  /// Boundary guard: max |psi| over the two-cell frame relative to the peak.
  double boundary_threshold = 1e-6;
};

/// Strang split-step spectral propagation over [0, u_span]:
/// half pointwise phase (gamma |psi|^2 + eps k^2 alpha^2 r^2), full kinetic
/// phase eps |kappa|^2 du / 2k in Fourier space, half pointwise phase. alpha is
/// sampled at the middle of each half step. If u_span is not a multiple of
/// grid.du the step is shortened to make it one. Moments and M_I^4 are
/// recorded at u = 0, every record_stride steps, and at the end.
PropagationRecord split_step_propagate(const TransverseField& field0, const ParaxialParams& params,
                                       const GridSpec& grid, double u_span, const SolverOptions& options = {});

/// <H> = eps K + V + eps U.
double effective_energy(const TransverseField& field, const ParaxialParams& params, double u);
double effective_energy(const MomentSet& m, int epsilon);

/// Step for which the largest pointwise and kinetic phase increments over the
/// occupied region of the initial field (|psi|^2 > 1e-12 peak, in both spaces)
/// stay below max_phase radians.
double suggest_step(const TransverseField& field, const ParaxialParams& params, double u_span,
                    double max_phase = 0.1);

}  // namespace paraxial
