#include "paraxial/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "paraxial/error.hpp"

namespace paraxial {
namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double energy_of(const AtomicBeamSpec& spec) {
  require(spec.energy.has_value(), ErrorKind::invalid_spec, "longitudinal treatment needs the beam energy");
  return *spec.energy;
}

void check_atomic(const AtomicBeamSpec& spec) {
  require(spec.mass > 0.0, ErrorKind::invalid_spec, "atomic mass must be positive");
  require(spec.hbar > 0.0, ErrorKind::invalid_spec, "hbar must be positive");
  require(spec.n1d >= 0.0, ErrorKind::invalid_spec, "linear density must be non-negative");
  require(std::isfinite(spec.a_s), ErrorKind::invalid_spec, "scattering length must be finite");
}

// Rejects a span that crosses a classical turning point before any quadrature.
void scan_allowed(const LongitudinalPotential& pot, double energy, double z_begin, double z_end) {
  constexpr int samples = 1024;
  auto check = [&](double z) {
    if (!(pot.u_par(z) < energy)) {
      throw Error(ErrorKind::turning_point,
                  "classical turning point: E <= U_par at z = " + std::to_string(z));
    }
  };
  for (int i = 0; i <= samples; ++i) check(z_begin + (z_end - z_begin) * i / samples);
  for (double b : pot.u_par.breakpoints_in(z_begin, z_end)) {
    check(b);
    if (!(pot.u_par.left_limit(b) < energy)) check(std::nextafter(b, -INFINITY));
  }
}

}  // namespace

void ParaxialParams::validate() const {
  require(k > 0.0 && std::isfinite(k), ErrorKind::invalid_spec, "k must be positive and finite");
  require(epsilon == 1 || epsilon == -1, ErrorKind::invalid_spec, "epsilon must be +1 or -1");
  require(std::isfinite(gamma), ErrorKind::invalid_spec, "gamma must be finite");
}

void ParaxialParams::validate_on(double u_begin, double u_end) const {
  validate();
  require(alpha.min_on(u_begin, u_end) >= 0.0, ErrorKind::invalid_spec,
          "alpha(u) must be non-negative on the propagation span");
  require(std::isfinite(alpha.max_abs_on(u_begin, u_end)), ErrorKind::invalid_spec,
          "alpha(u) must be finite on the propagation span");
}

ParaxialParams map_optical(const OpticalBeamSpec& spec) {
  require(spec.epsilon_r0 > 0.0, ErrorKind::invalid_spec, "relative permittivity must be positive");
  require(spec.omega > 0.0, ErrorKind::invalid_spec, "angular frequency must be positive");
  require(spec.c > 0.0, ErrorKind::invalid_spec, "speed of light must be positive");
  ParaxialParams p;
  p.k = std::sqrt(spec.epsilon_r0) * spec.omega / spec.c;
  p.epsilon = -1;
  p.gamma = spec.chi3 * p.k * p.k / spec.epsilon_r0;
  p.alpha = spec.beta;
  p.axis = AxisLabel::z_axis;
  return p;
}

ParaxialParams map_atomic(const AtomicBeamSpec& spec) {
  check_atomic(spec);
  ParaxialParams p;
  p.k = spec.mass / spec.hbar;
  p.epsilon = 1;
  p.gamma = 8.0 * std::numbers::pi * spec.n1d * spec.a_s;
  p.alpha = spec.omega_perp;
  p.axis = AxisLabel::tau_axis;
  return p;
}

double longitudinal_momentum(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z) {
  check_atomic(spec);
  double kinetic = energy_of(spec) - pot.u_par(z);
  if (!(kinetic > 0.0)) {
    throw Error(ErrorKind::turning_point, "classical turning point: E <= U_par at z = " + std::to_string(z));
  }
  return std::sqrt(2.0 * spec.mass * kinetic);
}

double tau_of_z(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z, double abs_tol) {
  check_atomic(spec);
  scan_allowed(pot, energy_of(spec), pot.z0, z);
  if (z == pot.z0) return 0.0;
  auto inverse_speed = [&](double zz) { return spec.mass / longitudinal_momentum(pot, spec, zz); };
  // Segment at profile kinks so each Simpson panel sees a smooth integrand.
  std::vector<double> cuts{pot.z0};
  auto inner = pot.u_par.breakpoints_in(pot.z0, z);
  if (z < pot.z0) std::reverse(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(z);
  double total = 0.0;
  double tol = abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate_adaptive_simpson(inverse_speed, cuts[i], cuts[i + 1], tol);
  }
  return total;
}

WkbSolution wkb_longitudinal(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z,
                             double abs_tol) {
  check_atomic(spec);
  require(spec.flux.has_value() && *spec.flux >= 0.0, ErrorKind::invalid_spec,
          "WKB amplitude needs a non-negative flux");
  scan_allowed(pot, energy_of(spec), pot.z0, z);
  double margin = wkb_validity(pot, spec, z);
  if (!(margin > 1.0)) {
    throw WkbInvalidError(margin, "WKB validity margin " + std::to_string(margin) + " <= 1 at z = " +
                                      std::to_string(z));
  }
  double p = longitudinal_momentum(pot, spec, z);
  auto momentum = [&](double zz) { return longitudinal_momentum(pot, spec, zz); };
  std::vector<double> cuts{pot.z0};
  auto inner = pot.u_par.breakpoints_in(pot.z0, z);
  if (z < pot.z0) std::reverse(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(z);
  double action = 0.0;
  double tol = abs_tol * spec.hbar / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    action += integrate_adaptive_simpson(momentum, cuts[i], cuts[i + 1], tol);
  }
  WkbSolution out;
  out.amplitude = std::sqrt(spec.mass * *spec.flux / p);
  out.phase = action / spec.hbar;
  return out;
}

double wkb_validity(const LongitudinalPotential& pot, const AtomicBeamSpec& spec, double z) {
  check_atomic(spec);
  double kinetic = energy_of(spec) - pot.u_par(z);
  if (!(kinetic > 0.0)) {
    throw Error(ErrorKind::turning_point, "classical turning point: E <= U_par at z = " + std::to_string(z));
  }
  double h = 1e-6 * std::max(1.0, std::abs(z));
  double force = std::abs(pot.u_par.slope(z, h));
  if (force == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(8.0 * spec.mass) * std::pow(kinetic, 1.5) / (spec.hbar * force);
}

double linear_density_variation(const LongitudinalPotential& pot, const AtomicBeamSpec& spec,
                                double z_begin, double z_end, int samples) {
  require(samples >= 2, ErrorKind::parameter, "need at least two samples");
  require(spec.flux.has_value(), ErrorKind::invalid_spec, "linear density needs the flux");
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < samples; ++i) {
    double z = z_begin + (z_end - z_begin) * i / (samples - 1);
    double n = spec.mass * *spec.flux / longitudinal_momentum(pot, spec, z);
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

double gravitational_sag(double g, double omega_perp) {
  require(omega_perp != 0.0, ErrorKind::division_by_zero,
          "gravitational sag needs a non-zero trap frequency; use the centered-width path instead");
  require(omega_perp > 0.0, ErrorKind::parameter, "trap frequency must be positive");
  return g / (omega_perp * omega_perp);
}

double paraxiality_ratio(double kinetic_moment, double hbar, double longitudinal_momentum) {
  require(longitudinal_momentum > 0.0, ErrorKind::parameter, "longitudinal momentum must be positive");
  require(kinetic_moment >= 0.0, ErrorKind::parameter, "kinetic moment must be non-negative");
  return hbar * std::sqrt(kinetic_moment) / longitudinal_momentum;
}

double integrate_adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                  int max_depth) {
  require(abs_tol > 0.0, ErrorKind::parameter, "quadrature tolerance must be positive");
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson(fa, fm, fb, b - a);
  return simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace paraxial
