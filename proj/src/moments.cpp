#include "paraxial/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "paraxial/error.hpp"

namespace paraxial {

void MomentTrajectory::push(const MomentSample& sample) {
  if (!samples_.empty() && !(sample.u > samples_.back().u)) {
    fail(ErrorKind::invariant_violation, "trajectory samples must have strictly increasing u");
  }
  samples_.push_back(sample);
}

std::vector<double> MomentTrajectory::u_values() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.u);
  return out;
}

double MomentTrajectory::max_relative_mi4_drift() const {
  if (samples_.empty()) return 0.0;
  double ref = samples_.front().mi4;
  double scale = std::abs(ref) > 0.0 ? std::abs(ref) : 1.0;
  double worst = 0.0;
  for (const auto& s : samples_) worst = std::max(worst, std::abs(s.mi4 - ref) / scale);
  return worst;
}

MomentSet compute_moments(const TransverseField& field, const ParaxialParams& params, double u) {
  Fft2d fft(field.size());
  return compute_moments(field, params, u, fft);
}

MomentSet compute_moments(const TransverseField& field, const ParaxialParams& params, double u,
                          const Fft2d& fft) {
  params.validate();
  const int n = field.size();
  require(fft.size() == n, ErrorKind::parameter, "FFT size does not match the field");
  const double dx = field.spacing();
  const double cell = dx * dx;

  double norm = field.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    fail(ErrorKind::normalization, "field norm " + std::to_string(norm) + " differs from 1");
  }

  std::vector<cplx> gx(field.values().begin(), field.values().end());
  fft.forward(gx);
  std::vector<cplx> gy = gx;
  const auto kappa = wavenumbers(n, field.extent());
  for (int iy = 0; iy < n; ++iy) {
    // The Nyquist mode has no odd counterpart; drop it from first derivatives.
    const double ky = iy == n / 2 ? 0.0 : kappa[static_cast<std::size_t>(iy)];
    for (int ix = 0; ix < n; ++ix) {
      const double kx = ix == n / 2 ? 0.0 : kappa[static_cast<std::size_t>(ix)];
      const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      gx[idx] *= cplx(0.0, kx);
      gy[idx] *= cplx(0.0, ky);
    }
  }
  fft.backward(gx);
  fft.backward(gy);

  double r2 = 0.0, sx = 0.0, sy = 0.0, quartic = 0.0;
  double kin = 0.0, dil = 0.0, kxm = 0.0, kym = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = field.coordinate(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double x = field.coordinate(ix);
      const std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      const cplx psi = field.values()[idx];
      const double rho = std::norm(psi);
      r2 += (x * x + y * y) * rho;
      sx += x * rho;
      sy += y * rho;
      quartic += rho * rho;
      kin += std::norm(gx[idx]) + std::norm(gy[idx]);
      const cplx cx = std::conj(psi) * gx[idx];
      const cplx cy = std::conj(psi) * gy[idx];
      dil += x * cx.imag() + y * cy.imag();
      kxm += cx.imag();
      kym += cy.imag();
    }
  }

  MomentSet m;
  m.r2 = r2 * cell;
  m.centroid = {sx * cell, sy * cell};
  m.w2 = std::max(0.0, m.r2 - m.centroid[0] * m.centroid[0] - m.centroid[1] * m.centroid[1]);
  m.K = kin * cell;
  m.V = 0.5 * params.gamma * quartic * cell;
  m.Q = dil * cell;
  m.mean_wavevector = {kxm * cell, kym * cell};
  const double a = params.alpha(u);
  m.U = params.k * params.k * a * a * m.r2;
  m.H0 = params.epsilon * m.K + m.V;
  return m;
}

EhrenfestRates ehrenfest_derivatives(const MomentSet& m, const ParaxialParams& params, double /*u*/) {
  params.validate();
  const double eps = params.epsilon;
  const double k = params.k;
  return {2.0 * eps / k * m.Q, 2.0 * eps / (k * k) * (m.H0 - eps * m.U)};
}

double free_expansion_r2(const MomentSet& m0, const ParaxialParams& params, double u) {
  params.validate();
  require(params.alpha.is_identically_zero(), ErrorKind::precondition,
          "free expansion law needs alpha == 0 over the span");
  const double eps = params.epsilon;
  const double k = params.k;
  return eps / (k * k) * m0.H0 * u * u + 2.0 * eps / k * m0.Q * u + m0.r2;
}

double tof_width(const MomentSet& m0, double k, double tau, double q_tolerance) {
  require(k > 0.0, ErrorKind::parameter, "k must be positive");
  if (!(std::abs(m0.Q) <= q_tolerance)) {
    fail(ErrorKind::precondition, "time-of-flight law needs <Q>_0 = 0, got " + std::to_string(m0.Q));
  }
  return 2.0 / (k * k) * (m0.K + m0.V) * tau * tau + m0.w2;
}

double velocity_dispersion_error(const MomentSet& m0) {
  require(m0.K > 0.0, ErrorKind::degenerate_beam, "kinetic moment must be positive");
  return m0.V / m0.K;
}

namespace {

struct OdeState {
  double r2, d1, d2;
};

OdeState rhs(const OdeState& s, double alpha2, double dalpha2) {
  return {s.d1, s.d2, -4.0 * alpha2 * s.d1 - 2.0 * dalpha2 * s.r2};
}

OdeState axpy(const OdeState& s, double h, const OdeState& d) {
  return {s.r2 + h * d.r2, s.d1 + h * d.d1, s.d2 + h * d.d2};
}

MomentSample sample_from_state(double u, const OdeState& s, const ParaxialParams& p) {
  const double eps = p.epsilon;
  const double k = p.k;
  const double a = p.alpha(u);
  MomentSample out;
  out.u = u;
  MomentSet& m = out.moments;
  m.r2 = s.r2;
  m.w2 = s.r2;
  m.Q = eps * k * s.d1 / 2.0;
  m.U = k * k * a * a * s.r2;
  // r2'' = (2 eps / k^2)(H0 - eps U)  =>  H0 = eps k^2 r2'' / 2 + eps U
  m.H0 = eps * k * k * s.d2 / 2.0 + eps * m.U;
  m.K = std::numeric_limits<double>::quiet_NaN();
  m.V = std::numeric_limits<double>::quiet_NaN();
  out.mi4 = quality_factor(m, p.epsilon);
  return out;
}

}  // namespace

MomentTrajectory moment_ode_solve(const MomentSet& m0, const ParaxialParams& params, double u_begin,
                                  double u_end, double step, int record_stride) {
  params.validate();
  require(step > 0.0 && std::isfinite(step), ErrorKind::parameter, "moment ODE step must be positive");
  require(u_end > u_begin, ErrorKind::parameter, "moment ODE span must be increasing");
  require(record_stride >= 1, ErrorKind::parameter, "record_stride must be >= 1");

  // U is taken from alpha at the start of the span rather than from m0.U, so
  // callers may seed the ODE from moments computed without a potential.
  MomentSet start = m0;
  const double a0 = params.alpha.inside(u_begin, u_begin, u_end);
  start.U = params.k * params.k * a0 * a0 * m0.r2;
  const auto rates = ehrenfest_derivatives(start, params, u_begin);
  OdeState state{m0.r2, rates.first, rates.second};

  const Profile& alpha = params.alpha;
  auto alpha2 = [&](double u, double lo, double hi) {
    double a = alpha.inside(u, lo, hi);
    return a * a;
  };
  auto dalpha2 = [&](double u, double lo, double hi) {
    double lo_in = std::min(lo, hi), hi_in = std::max(lo, hi);
    double margin = 1e-12 * std::max({1.0, std::abs(lo_in), std::abs(hi_in)});
    double uc = std::clamp(u, lo_in + margin, hi_in - margin);
    return 2.0 * alpha(uc) * alpha.slope(uc, step);
  };

  MomentTrajectory traj;
  traj.push(sample_from_state(u_begin, state, params));

  std::vector<double> cuts{u_begin};
  auto inner = alpha.breakpoints_in(u_begin, u_end);
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(u_end);

  long long counter = 0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double lo = cuts[seg], hi = cuts[seg + 1];
    if (seg > 0) {
      // alpha^2 may jump here; r2'' + 2 alpha^2 r2 stays continuous.
      const double left = alpha.left_limit(lo), right = alpha(lo);
      state.d2 -= 2.0 * (right * right - left * left) * state.r2;
    }
    const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil((hi - lo) / step - 1e-9)));
    const double h = (hi - lo) / static_cast<double>(steps);
    for (long long i = 0; i < steps; ++i) {
      const double u = lo + h * static_cast<double>(i);
      const double um = u + 0.5 * h, ue = (i + 1 == steps) ? hi : u + h;
      const OdeState k1 = rhs(state, alpha2(u, lo, hi), dalpha2(u, lo, hi));
      const OdeState k2 = rhs(axpy(state, 0.5 * h, k1), alpha2(um, lo, hi), dalpha2(um, lo, hi));
      const OdeState k3 = rhs(axpy(state, 0.5 * h, k2), alpha2(um, lo, hi), dalpha2(um, lo, hi));
      const OdeState k4 = rhs(axpy(state, h, k3), alpha2(ue, lo, hi), dalpha2(ue, lo, hi));
      state.r2 += h / 6.0 * (k1.r2 + 2.0 * k2.r2 + 2.0 * k3.r2 + k4.r2);
      state.d1 += h / 6.0 * (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1);
      state.d2 += h / 6.0 * (k1.d2 + 2.0 * k2.d2 + 2.0 * k3.d2 + k4.d2);
      ++counter;
      const bool last = (seg + 2 == cuts.size()) && (i + 1 == steps);
      if (last || counter % record_stride == 0) {
        // Sample on the segment's own side of a breakpoint.
        MomentSample s = sample_from_state(ue, state, params);
        const double a = alpha.inside(ue, lo, hi);
        s.moments.U = params.k * params.k * a * a * state.r2;
        s.moments.H0 = params.epsilon * params.k * params.k * state.d2 / 2.0 + params.epsilon * s.moments.U;
        s.mi4 = quality_factor(s.moments, params.epsilon);
        traj.push(s);
      }
    }
  }
  return traj;
}

double quality_factor(const MomentSet& m, int epsilon) { return epsilon * m.r2 * m.H0 - m.Q * m.Q; }

double centered_quality_factor(const MomentSet& m, int epsilon) {
  const auto& c = m.centroid;
  const auto& kv = m.mean_wavevector;
  const double kc = m.K - kv[0] * kv[0] - kv[1] * kv[1];
  const double qc = m.Q - (c[0] * kv[0] + c[1] * kv[1]);
  const double h0c = epsilon * kc + m.V;
  return epsilon * m.w2 * h0c - qc * qc;
}

double self_trapping_threshold(double a_s) {
  require(a_s < 0.0, ErrorKind::not_attractive, "self-trapping needs attractive interactions (a_s < 0)");
  return 1.0 / (2.0 * std::abs(a_s));
}

double oscillation_frequency(std::span<const double> u, std::span<const double> signal) {
  require(u.size() == signal.size(), ErrorKind::parameter, "sample arrays differ in length");
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = signal[i], b = signal[i + 1];
    if (a == 0.0) {
      if (crossings.empty() || crossings.back() != u[i]) crossings.push_back(u[i]);
    } else if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      crossings.push_back(u[i] + (u[i + 1] - u[i]) * a / (a - b));
    }
  }
  require(crossings.size() >= 3, ErrorKind::degenerate_beam,
          "need at least three zero crossings to extract a frequency");
  return std::numbers::pi * static_cast<double>(crossings.size() - 1) / (crossings.back() - crossings.front());
}

}  // namespace paraxial
