#pragma once

#include <complex>
#include <span>
#include <vector>

#include "paraxial/moments.hpp"
#include "paraxial/profile.hpp"

namespace paraxial {

/// Tolerance on |AD - BC - 1|, scaled by max(1, |AD| + |BC|) so that
/// rounding in large-entry matrices is not mistaken for a broken invariant.
inline constexpr double determinant_tolerance = 1e-9;

/// 2x2 real ray-transfer matrix with unit determinant.
class RayMatrix {
 public:
  /// Throws invariant_violation when the determinant is not one.
  RayMatrix(double a, double b, double c, double d);

  static RayMatrix identity() { return RayMatrix(1.0, 0.0, 0.0, 1.0); }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }
  double det() const noexcept { return a_ * d_ - b_ * c_; }
  RayMatrix inverse() const { return RayMatrix(d_, -b_, -c_, a_); }

  bool operator==(const RayMatrix&) const = default;

 private:
  double a_, b_, c_, d_;
};

RayMatrix free_matrix(double u);
/// [[cos au, sin(au)/a], [-a sin au, cos au]]; alpha0 must be positive.
RayMatrix harmonic_matrix(double alpha0, double u);
/// Matrix product m2 * m1 (m1 acts first).
RayMatrix compose(const RayMatrix& m2, const RayMatrix& m1);

struct MatrixOdeResult {
  RayMatrix matrix = RayMatrix::identity();
  /// Largest |det - 1| seen before each renormalization.
  double max_det_drift = 0.0;
  long long steps = 0;
};

/// Integrates dM/du = [[0, 1], [-alpha^2(u), 0]] M from the identity with RK4,
/// splitting the span at profile breakpoints and rescaling M by det^{-1/2}
/// after every step.
MatrixOdeResult matrix_ode_detailed(const Profile& alpha, double u_begin, double u_end, double step);
RayMatrix matrix_ode(const Profile& alpha, double u_begin, double u_end, double step);

/// Generalized complex curvature, stored as 1/q = 1/R + i M_I^2/(k w^2).
/// The imaginary part must be strictly positive.
class InverseCurvature {
 public:
  explicit InverseCurvature(std::complex<double> inverse_q);
  InverseCurvature(double inv_R, double imag) : InverseCurvature(std::complex<double>(inv_R, imag)) {}
  static InverseCurvature from_q(std::complex<double> q);

  double inv_R() const noexcept { return value_.real(); }
  double imag() const noexcept { return value_.imag(); }
  std::complex<double> inverse_q() const noexcept { return value_; }
  std::complex<double> q() const { return 1.0 / value_; }

  /// Second-moment width w^2 = M_I^2 / (k Im(1/q)).
  double width_squared(double mi4, double k) const;

 private:
  std::complex<double> value_;
};

/// Moebius action q2 = (A q1 + B) / (C q1 + D), evaluated on 1/q.
InverseCurvature propagate_q(const InverseCurvature& q1, const RayMatrix& m);

/// 1/R = eps Q / (k r2), Im(1/q) = sqrt(M_I^4) / (k r2). Throws collapse_regime
/// when M_I^4 <= 0.
InverseCurvature q_from_moments(const MomentSet& m, double mi4, double k, int epsilon);

struct WidthRelations {
  double w2 = 0.0;          ///< w_2^2
  double w2_over_R = 0.0;   ///< w_2^2 / R_2
};

/// Direct evaluation of the input-output relations for w^2 and w^2/R.
WidthRelations input_output_relations(double w1_sq, double inv_R1, double mi4, double k, const RayMatrix& m);

struct GaussianPropagation {
  InverseCurvature q{0.0, 1.0};
  /// 1/e^2 intensity radius, Im(1/q) = 2 / (k w^2).
  double w = 0.0;
  /// (A + B/q1)^{-1/2}, principal branch.
  std::complex<double> amplitude;
};

/// Linear (gamma = 0) Gaussian beam through a ray matrix. w1 is the input 1/e^2
/// radius and must agree with q1. For eps = -1 the field carries exp(-ik x^2 / 2q*),
/// for eps = +1 exp(ik x^2 / 2q); the amplitude factor uses that field q.
GaussianPropagation linear_gaussian_propagate(const InverseCurvature& q1, double w1, const RayMatrix& m, double k,
                                              int epsilon);

/// Amplitude factors along a sampled path of matrices starting near the
/// identity, with the square-root branch tracked continuously (Gouy phase).
std::vector<std::complex<double>> amplitude_factors_along(const InverseCurvature& q1,
                                                          std::span<const RayMatrix> path, int epsilon);

enum class KernelFlavor { optical, atomic };

/// One-dimensional propagator from input x_in to output x_out,
///   sqrt(-i eps k / 2 pi B) exp(i eps k (A x_in^2 - 2 x_in x_out + D x_out^2) / 2B),
/// with eps = -1 for the optical flavor and +1 for the atomic one.
std::complex<double> propagator_kernel(double x_out, double x_in, const RayMatrix& m, double k,
                                       KernelFlavor flavor);

}  // namespace paraxial
