#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "paraxial/profile.hpp"

namespace paraxial {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double speed_of_light = 299792458.0;   // m/s
inline constexpr double standard_gravity = 9.80665;     // m/s^2
}  // namespace constants

enum class AxisLabel { z_axis, tau_axis };

/// Coefficients of 2ik dpsi/du = -eps Lap psi + gamma |psi|^2 psi + eps k^2 alpha^2(u) r^2 psi.
struct ParaxialParams {
  double k = 1.0;
  int epsilon = 1;
  double gamma = 0.0;
  Profile alpha = Profile::constant(0.0);
  AxisLabel axis = AxisLabel::z_axis;

  /// Throws invalid_spec unless k > 0 and epsilon is +1 or -1; if a span is
  /// given, alpha must also be finite and non-negative on it.
  void validate() const;
  void validate_on(double u_begin, double u_end) const;

  bool operator==(const ParaxialParams&) const = default;
};

struct OpticalBeamSpec {
  double epsilon_r0 = 1.0;
  double omega = 1.0;
  double c = constants::speed_of_light;
  double chi3 = 0.0;
  Profile beta = Profile::constant(0.0);

  bool operator==(const OpticalBeamSpec&) const = default;
};

struct AtomicBeamSpec {
  double mass = 1.0;
  double hbar = constants::hbar;
  double n1d = 0.0;
  double a_s = 0.0;
  Profile omega_perp = Profile::constant(0.0);
  std::optional<double> flux;
  std::optional<double> energy;

  bool operator==(const AtomicBeamSpec&) const = default;
};

struct LongitudinalPotential {
  Profile u_par = Profile::constant(0.0);
  double z0 = 0.0;

  bool operator==(const LongitudinalPotential&) const = default;
};

ParaxialParams map_optical(const OpticalBeamSpec& spec);
ParaxialParams map_atomic(const AtomicBeamSpec& spec);

/// Classical momentum sqrt(2m(E - U_par(z))); throws turning_point when E <= U_par(z).
double longitudinal_momentum(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z);

/// Classical transit time from z0 to z.
double tau_of_z(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z,
                double abs_tol = 1e-10);

struct WkbSolution {
  double amplitude = 0.0;
  double phase = 0.0;
  /// |psi_par|^2 = m F / p(z).
  double linear_density() const { return amplitude * amplitude; }
};

WkbSolution wkb_longitudinal(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z,
                             double abs_tol = 1e-10);

/// sqrt(8m)(E-U)^{3/2} / (hbar |dU/dz|); +inf where the potential is flat.
double wkb_validity(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z);

/// Relative spread (max - min) / max of the WKB linear density over [z_begin, z_end].
double linear_density_variation(const LongitudinalPotential& pot, const AtomicBeamSpec& spec,
                                double z_begin, double z_end, int samples = 1025);

/// Vertical offset g / omega_perp^2 of the trap minimum under gravity.
double gravitational_sag(double g, double omega_perp);

/// rms transverse over longitudinal momentum, hbar sqrt(<K>) / p.
double paraxiality_ratio(double kinetic_moment, double hbar, double longitudinal_momentum);

/// Adaptive Simpson quadrature of f over [a, b] (a > b allowed, sign follows).
double integrate_adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-10, int max_depth = 50);

}  // namespace paraxial
