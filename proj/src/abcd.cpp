#include "paraxial/abcd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "paraxial/error.hpp"

namespace paraxial {
namespace {

bool unimodular(double a, double b, double c, double d) {
  const double scale = std::max(1.0, std::abs(a * d) + std::abs(b * c));
  return std::abs(a * d - b * c - 1.0) <= determinant_tolerance * scale;
}

double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  x = std::fmod(x + std::numbers::pi, two_pi);
  if (x < 0.0) x += two_pi;
  return x - std::numbers::pi;
}

// A + B / q_field for the field convention of the given eps.
std::complex<double> gouy_term(const InverseCurvature& q1, const RayMatrix& m, int epsilon) {
  const std::complex<double> s = epsilon > 0 ? q1.inverse_q() : std::conj(q1.inverse_q());
  return m.a() + m.b() * s;
}

}  // namespace

RayMatrix::RayMatrix(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d),
          ErrorKind::invariant_violation, "ray matrix entries must be finite");
  if (!unimodular(a, b, c, d)) {
    fail(ErrorKind::invariant_violation,
         "ray matrix determinant " + std::to_string(a * d - b * c) + " is not 1");
  }
}

RayMatrix free_matrix(double u) { return RayMatrix(1.0, u, 0.0, 1.0); }

RayMatrix harmonic_matrix(double alpha0, double u) {
  require(alpha0 > 0.0, ErrorKind::parameter, "harmonic matrix needs alpha0 > 0 (use free_matrix for 0)");
  const double phase = alpha0 * u;
  const double cs = std::cos(phase), sn = std::sin(phase);
  return RayMatrix(cs, sn / alpha0, -alpha0 * sn, cs);
}

RayMatrix compose(const RayMatrix& m2, const RayMatrix& m1) {
  return RayMatrix(m2.a() * m1.a() + m2.b() * m1.c(), m2.a() * m1.b() + m2.b() * m1.d(),
                   m2.c() * m1.a() + m2.d() * m1.c(), m2.c() * m1.b() + m2.d() * m1.d());
}

MatrixOdeResult matrix_ode_detailed(const Profile& alpha, double u_begin, double u_end, double step) {
  require(step > 0.0 && std::isfinite(step), ErrorKind::parameter, "matrix ODE step must be positive");
  MatrixOdeResult out;
  if (u_end == u_begin) return out;
  const double direction = u_end > u_begin ? 1.0 : -1.0;

  std::vector<double> cuts{u_begin};
  auto inner = alpha.breakpoints_in(u_begin, u_end);
  if (direction < 0.0) std::reverse(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(u_end);

  // Columns (A, C) and (B, D) each obey y' = [[0, 1], [-alpha^2, 0]] y.
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double lo = cuts[seg], hi = cuts[seg + 1];
    const long long steps =
        std::max<long long>(1, static_cast<long long>(std::ceil(std::abs(hi - lo) / step - 1e-9)));
    const double h = (hi - lo) / static_cast<double>(steps);
    auto a2 = [&](double u) {
      double v = alpha.inside(u, lo, hi);
      return v * v;
    };
    for (long long i = 0; i < steps; ++i) {
      const double u = lo + h * static_cast<double>(i);
      const double w0 = a2(u), wm = a2(u + 0.5 * h), w1 = a2(i + 1 == steps ? hi : u + h);
      auto advance = [&](double& x, double& y) {
        const double k1x = y, k1y = -w0 * x;
        const double k2x = y + 0.5 * h * k1y, k2y = -wm * (x + 0.5 * h * k1x);
        const double k3x = y + 0.5 * h * k2y, k3y = -wm * (x + 0.5 * h * k2x);
        const double k4x = y + h * k3y, k4y = -w1 * (x + h * k3x);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      };
      advance(a, c);
      advance(b, d);
      const double det = a * d - b * c;
      out.max_det_drift = std::max(out.max_det_drift, std::abs(det - 1.0));
      require(det > 0.0 && std::isfinite(det), ErrorKind::instability, "matrix ODE lost unimodularity");
      const double scale = 1.0 / std::sqrt(det);
      a *= scale;
      b *= scale;
      c *= scale;
      d *= scale;
      ++out.steps;
    }
  }
  out.matrix = RayMatrix(a, b, c, d);
  return out;
}

RayMatrix matrix_ode(const Profile& alpha, double u_begin, double u_end, double step) {
  return matrix_ode_detailed(alpha, u_begin, u_end, step).matrix;
}

InverseCurvature::InverseCurvature(std::complex<double> inverse_q) : value_(inverse_q) {
  require(std::isfinite(value_.real()) && std::isfinite(value_.imag()), ErrorKind::parameter,
          "1/q must be finite");
  require(value_.imag() > 0.0, ErrorKind::parameter,
          "Im(1/q) must be positive (plane-wave limit is not a beam)");
}

InverseCurvature InverseCurvature::from_q(std::complex<double> q) {
  require(q != 0.0, ErrorKind::parameter, "q must be non-zero");
  return InverseCurvature(1.0 / q);
}

double InverseCurvature::width_squared(double mi4, double k) const {
  require(mi4 > 0.0, ErrorKind::collapse_regime, "M_I^4 must be positive");
  require(k > 0.0, ErrorKind::parameter, "k must be positive");
  return std::sqrt(mi4) / (k * imag());
}

InverseCurvature propagate_q(const InverseCurvature& q1, const RayMatrix& m) {
  const std::complex<double> s = q1.inverse_q();
  const std::complex<double> den = m.a() + m.b() * s;
  if (std::abs(den) == 0.0) fail(ErrorKind::singular_propagation, "degenerate q-law denominator");
  return InverseCurvature((m.c() + m.d() * s) / den);
}

InverseCurvature q_from_moments(const MomentSet& m, double mi4, double k, int epsilon) {
  require(k > 0.0, ErrorKind::parameter, "k must be positive");
  require(m.r2 > 0.0, ErrorKind::degenerate_beam, "beam width must be positive");
  if (!(mi4 > 0.0)) {
    fail(ErrorKind::collapse_regime, "M_I^4 = " + std::to_string(mi4) + " <= 0: no complex curvature");
  }
  return InverseCurvature(epsilon * m.Q / (k * m.r2), std::sqrt(mi4) / (k * m.r2));
}

WidthRelations input_output_relations(double w1_sq, double inv_R1, double mi4, double k, const RayMatrix& m) {
  require(w1_sq > 0.0 && k > 0.0, ErrorKind::parameter, "width and k must be positive");
  const double ab = m.a() + m.b() * inv_R1;
  const double cd = m.c() + m.d() * inv_R1;
  const double spread = mi4 / (k * k * w1_sq);
  return {w1_sq * ab * ab + spread * m.b() * m.b(), w1_sq * ab * cd + spread * m.b() * m.d()};
}

GaussianPropagation linear_gaussian_propagate(const InverseCurvature& q1, double w1, const RayMatrix& m, double k,
                                              int epsilon) {
  require(k > 0.0 && w1 > 0.0, ErrorKind::parameter, "k and w1 must be positive");
  require(epsilon == 1 || epsilon == -1, ErrorKind::parameter, "epsilon must be +1 or -1");
  const double expected = 2.0 / (k * w1 * w1);
  require(std::abs(q1.imag() - expected) <= 1e-9 * expected, ErrorKind::parameter,
          "w1 is inconsistent with Im(1/q1) = 2/(k w1^2)");
  const std::complex<double> z = gouy_term(q1, m, epsilon);
  if (std::abs(z) == 0.0) fail(ErrorKind::singular_propagation, "degenerate q-law denominator");
  GaussianPropagation out;
  out.q = propagate_q(q1, m);
  out.w = std::sqrt(2.0 / (k * out.q.imag()));
  out.amplitude = 1.0 / std::sqrt(z);
  return out;
}

std::vector<std::complex<double>> amplitude_factors_along(const InverseCurvature& q1,
                                                          std::span<const RayMatrix> path, int epsilon) {
  std::vector<std::complex<double>> out;
  out.reserve(path.size());
  double phase = 0.0;
  double previous = 0.0;
  bool first = true;
  for (const RayMatrix& m : path) {
    const std::complex<double> z = gouy_term(q1, m, epsilon);
    if (std::abs(z) == 0.0) fail(ErrorKind::singular_propagation, "degenerate q-law denominator");
    const double arg = std::arg(z);
    phase = first ? arg : phase + wrap_angle(arg - previous);
    previous = arg;
    first = false;
    out.push_back(std::polar(1.0 / std::sqrt(std::abs(z)), -0.5 * phase));
  }
  return out;
}

std::complex<double> propagator_kernel(double x_out, double x_in, const RayMatrix& m, double k,
                                       KernelFlavor flavor) {
  require(k > 0.0, ErrorKind::parameter, "k must be positive");
  if (m.b() == 0.0) fail(ErrorKind::thin_element, "B = 0: the propagator is a delta distribution");
  const double eps = flavor == KernelFlavor::optical ? -1.0 : 1.0;
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> prefactor = std::sqrt(-i * eps * k / (2.0 * std::numbers::pi * m.b()));
  const double quadratic = m.a() * x_in * x_in - 2.0 * x_in * x_out + m.d() * x_out * x_out;
  return prefactor * std::exp(i * eps * k * quadratic / (2.0 * m.b()));
}

}  // namespace paraxial
