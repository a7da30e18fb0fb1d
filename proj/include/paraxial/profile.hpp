#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace paraxial {

/// A real function of the propagation coordinate (alpha(u), beta(z),
/// omega_perp(tau), U_par(z)). Built-in closed forms carry analytic slopes;
/// tabulated samples are interpolated linearly and clamped outside the table.
class Profile {
 public:
  struct Constant {
    double value = 0.0;
    bool operator==(const Constant&) const = default;
  };
  struct Linear {
    double offset = 0.0;
    double slope = 0.0;
    bool operator==(const Linear&) const = default;
  };
  /// mean + amplitude * sin(angular_frequency * u + phase)
  struct Sinusoidal {
    double mean = 0.0;
    double amplitude = 0.0;
    double angular_frequency = 0.0;
    double phase = 0.0;
    bool operator==(const Sinusoidal&) const = default;
  };
  /// values[i] holds on [breaks[i-1], breaks[i]); values.size() == breaks.size() + 1.
  struct PiecewiseConstant {
    std::vector<double> breaks;
    std::vector<double> values;
    bool operator==(const PiecewiseConstant&) const = default;
  };
  struct Tabulated {
    std::vector<double> nodes;
    std::vector<double> values;
    bool operator==(const Tabulated&) const = default;
  };
  using Shape = std::variant<Constant, Linear, Sinusoidal, PiecewiseConstant, Tabulated>;

  Profile() = default;

  static Profile constant(double value);
  static Profile linear(double offset, double slope);
  static Profile sinusoidal(double mean, double amplitude, double angular_frequency,
                            double phase = 0.0);
  static Profile piecewise_constant(std::vector<double> breaks, std::vector<double> values);
  static Profile tabulated(std::vector<double> nodes, std::vector<double> values);

  /// Text form used by configuration files, e.g. "constant 0.7",
  /// "piecewise 5 ; 0.7 1.2", "tabulated 0 1 2 ; 0.5 0.6 0.4".
  static Profile parse(std::string_view text);
  std::string to_string() const;

  double operator()(double u) const;
  double left_limit(double u) const;

  /// d/du of the profile. Tabulated profiles use a central difference with
  /// step h; built-ins are exact (zero inside piecewise-constant segments).
  double slope(double u, double h) const;

  /// d(profile^2)/du.
  double square_slope(double u, double h) const { return 2.0 * (*this)(u) * slope(u, h); }

  /// Points where the value or its slope is discontinuous, ascending.
  std::vector<double> breakpoints() const;
  std::vector<double> breakpoints_in(double begin, double end) const;

  /// Evaluate with u clamped strictly inside (begin, end) so that a sample at
  /// a segment boundary takes the one-sided limit of that segment.
  double inside(double u, double begin, double end) const;

  bool is_constant() const;
  bool is_identically_zero() const;
  double max_abs_on(double begin, double end) const;
  double min_on(double begin, double end) const;

  const Shape& shape() const noexcept { return shape_; }
  bool operator==(const Profile&) const = default;

 private:
  explicit Profile(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_{Constant{}};
};

}  // namespace paraxial
