#include "paraxial/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "paraxial/error.hpp"

namespace paraxial {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void GridSpec::validate() const {
  require(is_power_of_two(n) && n >= 64, ErrorKind::parameter,
          "grid size must be a power of two >= 64, got " + std::to_string(n));
  require(extent > 0.0 && std::isfinite(extent), ErrorKind::parameter, "grid extent must be positive");
  require(du > 0.0 && std::isfinite(du), ErrorKind::parameter, "step du must be positive");
  require(record_stride >= 1, ErrorKind::parameter, "record_stride must be >= 1");
}

TransverseField::TransverseField(int n, double extent)
    : TransverseField(n, extent, std::vector<cplx>(static_cast<std::size_t>(n) * n)) {}

TransverseField::TransverseField(int n, double extent, std::vector<cplx> values)
    : n_(n), extent_(extent), values_(std::move(values)) {
  require(is_power_of_two(n) && n >= 4, ErrorKind::parameter, "field size must be a power of two");
  require(extent > 0.0, ErrorKind::parameter, "field extent must be positive");
  require(values_.size() == static_cast<std::size_t>(n) * n, ErrorKind::parameter,
          "field data does not match n x n");
}

double TransverseField::norm() const {
  double sum = 0.0;
  for (const cplx& v : values_) sum += std::norm(v);
  return sum * spacing() * spacing();
}

void TransverseField::normalize() {
  double nrm = norm();
  require(nrm > 0.0 && std::isfinite(nrm), ErrorKind::normalization, "cannot normalize a null field");
  double scale = 1.0 / std::sqrt(nrm);
  for (cplx& v : values_) v *= scale;
}

double TransverseField::peak_magnitude() const {
  double peak = 0.0;
  for (const cplx& v : values_) peak = std::max(peak, std::norm(v));
  return std::sqrt(peak);
}

double TransverseField::boundary_ratio() const {
  double edge = 0.0;
  auto visit = [&](int ix, int iy) { edge = std::max(edge, std::norm((*this)(ix, iy))); };
  for (int i = 0; i < n_; ++i) {
    for (int f : {0, 1, n_ - 2, n_ - 1}) {
      visit(i, f);
      visit(f, i);
    }
  }
  double peak = peak_magnitude();
  return peak > 0.0 ? std::sqrt(edge) / peak : 0.0;
}

Fft2d::Fft2d(int n) : n_(n) {
  require(is_power_of_two(n), ErrorKind::parameter, "FFT size must be a power of two");
  std::vector<cplx> scratch(static_cast<std::size_t>(n) * n);
  std::lock_guard lock(planner_mutex());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_2d(n, n, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_2d(n, n, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  require(forward_plan_ && backward_plan_, ErrorKind::parameter, "FFTW planning failed");
}

Fft2d::~Fft2d() {
  if (!forward_plan_ && !backward_plan_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

Fft2d::Fft2d(Fft2d&& other) noexcept
    : n_(other.n_), forward_plan_(other.forward_plan_), backward_plan_(other.backward_plan_) {
  other.forward_plan_ = nullptr;
  other.backward_plan_ = nullptr;
}

Fft2d& Fft2d::operator=(Fft2d&& other) noexcept {
  std::swap(n_, other.n_);
  std::swap(forward_plan_, other.forward_plan_);
  std::swap(backward_plan_, other.backward_plan_);
  return *this;
}

void Fft2d::forward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

void Fft2d::backward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()), as_fftw(data.data()));
  double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (cplx& v : data) v *= scale;
}

std::vector<double> wavenumbers(int n, double extent) {
  std::vector<double> k(static_cast<std::size_t>(n));
  double dk = 2.0 * std::numbers::pi / extent;
  for (int m = 0; m < n; ++m) k[static_cast<std::size_t>(m)] = dk * (m < n / 2 ? m : m - n);
  return k;
}

}  // namespace paraxial
