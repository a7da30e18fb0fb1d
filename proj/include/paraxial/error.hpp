#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace paraxial {

enum class ErrorKind {
  invalid_spec,
  turning_point,
  wkb_invalid,
  division_by_zero,
  normalization,
  precondition,
  degenerate_beam,
  parameter,
  not_attractive,
  singular_propagation,
  collapse_regime,
  thin_element,
  grid_too_coarse,
  grid_too_small,
  domain_overflow,
  instability,
  config,
  invariant_violation,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so front ends can map
/// it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// WKB validity failure; margin is the ratio that fell below one.
class WkbInvalidError : public Error {
 public:
  WkbInvalidError(double margin, const std::string& message)
      : Error(ErrorKind::wkb_invalid, message), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

/// Raised by the propagator; u is the axis coordinate where the run stopped.
class PropagationError : public Error {
 public:
  PropagationError(ErrorKind kind, double u, const std::string& message)
      : Error(kind, message), u_(u) {}
  double u() const noexcept { return u_; }

 private:
  double u_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace paraxial
