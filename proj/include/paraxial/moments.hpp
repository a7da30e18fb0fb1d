#pragma once

#include <array>
#include <span>
#include <vector>

#include "paraxial/core.hpp"
#include "paraxial/field.hpp"

namespace paraxial {

/// Second-order moments and effective-energy terms of a normalized field.
///   r2 = <r^2>, Q = <Q>, K = int |grad psi|^2, V = (gamma/2) int |psi|^4,
///   U = k^2 alpha^2 <r^2>, H0 = eps K + V, w2 = centered width.
/// Moment-ODE samples do not resolve K and V separately; those entries are NaN there.
struct MomentSet {
  double r2 = 0.0;
  double Q = 0.0;
  double K = 0.0;
  double V = 0.0;
  double U = 0.0;
  double H0 = 0.0;
  std::array<double, 2> centroid{0.0, 0.0};
  double w2 = 0.0;
  /// <kappa> = Im int psi* grad psi; zero for a beam with no net tilt.
  std::array<double, 2> mean_wavevector{0.0, 0.0};
};

struct MomentSample {
  double u = 0.0;
  MomentSet moments;
  double mi4 = 0.0;
};

class MomentTrajectory {
 public:
  /// Throws invariant_violation unless u increases strictly.
  void push(const MomentSample& sample);
  std::span<const MomentSample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const MomentSample& front() const { return samples_.front(); }
  const MomentSample& back() const { return samples_.back(); }
  const MomentSample& operator[](std::size_t i) const { return samples_[i]; }

  std::vector<double> u_values() const;
  /// Largest |MI4(u) - MI4(u0)| / |MI4(u0)| along the trajectory.
  double max_relative_mi4_drift() const;

 private:
  std::vector<MomentSample> samples_;
};

/// Grid quadrature of the moment integrals; gradients are spectral.
/// Throws normalization if the field norm differs from one by more than 1e-9.
MomentSet compute_moments(const TransverseField& field, const ParaxialParams& params, double u);
MomentSet compute_moments(const TransverseField& field, const ParaxialParams& params, double u,
                          const Fft2d& fft);

struct EhrenfestRates {
  double first = 0.0;   ///< d<r^2>/du
  double second = 0.0;  ///< d^2<r^2>/du^2
};

EhrenfestRates ehrenfest_derivatives(const MomentSet& m, const ParaxialParams& params, double u);

/// Parabolic <r^2>(u) for alpha == 0.
double free_expansion_r2(const MomentSet& m0, const ParaxialParams& params, double u);

/// Centered width w^2(tau) = (2/k^2)(K0 + V0) tau^2 + w^2(0) of an atomic beam
/// released with <Q>_0 = 0. Throws precondition if |Q0| > q_tolerance.
double tof_width(const MomentSet& m0, double k, double tau, double q_tolerance = 1e-8);

/// Relative overestimate V0/K0 of the kinetic-only velocity dispersion.
double velocity_dispersion_error(const MomentSet& m0);

/// RK4 integration of the closed third-order law for <r^2> with state
/// (r2, r2', r2''). Q and H0 - eps U are reconstructed from the derivatives;
/// jumps of alpha^2 at profile breakpoints shift r2'' by -2 [alpha^2] r2.
MomentTrajectory moment_ode_solve(const MomentSet& m0, const ParaxialParams& params, double u_begin,
                                  double u_end, double step, int record_stride = 1);

/// M_I^4 = eps <r^2> <H0> - <Q>^2. Negative values indicate collapse.
double quality_factor(const MomentSet& m, int epsilon);

/// Same invariant with the moments taken about the centroid and the centroid
/// motion removed from K and Q: eps w2 (eps Kc + V) - Qc^2. Appropriate for
/// off-axis beams in linear potentials; equals quality_factor for centered beams.
double centered_quality_factor(const MomentSet& m, int epsilon);

/// Critical linear density 1/(2|a_s|) for attractive interactions.
double self_trapping_threshold(double a_s);

/// Angular frequency of an oscillating signal from linearly interpolated zero
/// crossings: pi (crossings - 1) / (last - first). Needs at least 3 crossings.
double oscillation_frequency(std::span<const double> u, std::span<const double> signal);

}  // namespace paraxial
