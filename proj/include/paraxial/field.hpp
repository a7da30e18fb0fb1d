#pragma once

#include <complex>
#include <span>
#include <vector>

namespace paraxial {

using cplx = std::complex<double>;

struct GridSpec {
  int n = 256;
  double extent = 16.0;
  double du = 1e-3;
  int record_stride = 10;

  double spacing() const { return extent / n; }
  /// n a power of two >= 64, extent > 0, du > 0, record_stride >= 1.
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Complex transverse amplitude on an n x n periodic grid of side `extent`,
/// stored row-major (index iy * n + ix). Sample j sits at (j - n/2) * dx, so
/// the origin is the grid point n/2.
class TransverseField {
 public:
  TransverseField(int n, double extent);
  TransverseField(int n, double extent, std::vector<cplx> values);

  int size() const noexcept { return n_; }
  double extent() const noexcept { return extent_; }
  double spacing() const noexcept { return extent_ / n_; }
  double coordinate(int j) const noexcept { return (j - n_ / 2) * spacing(); }

  cplx& operator()(int ix, int iy) { return values_[static_cast<std::size_t>(iy) * n_ + ix]; }
  const cplx& operator()(int ix, int iy) const { return values_[static_cast<std::size_t>(iy) * n_ + ix]; }

  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }

  /// Midpoint-rule integral of |psi|^2.
  double norm() const;
  void normalize();
  double peak_magnitude() const;
  /// max |psi| over the outer two-cell frame divided by the peak |psi|.
  double boundary_ratio() const;

 private:
  int n_;
  double extent_;
  std::vector<cplx> values_;
};

/// In-place, unnormalized 2D FFT of an n x n row-major array. Plans are built
/// once per instance; plan construction is serialized across threads.
class Fft2d {
 public:
  explicit Fft2d(int n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;
  Fft2d(Fft2d&& other) noexcept;
  Fft2d& operator=(Fft2d&& other) noexcept;

  int size() const noexcept { return n_; }
  void forward(std::span<cplx> data) const;
  /// Inverse transform scaled by 1/n^2, so backward(forward(x)) == x.
  void backward(std::span<cplx> data) const;

 private:
  int n_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Angular wavenumbers 2 pi m / extent in FFT order (m = 0..n/2-1, -n/2..-1).
std::vector<double> wavenumbers(int n, double extent);

bool is_power_of_two(int n);

}  // namespace paraxial
