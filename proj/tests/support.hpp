#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "paraxial/field.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Fixed-seed generator so failures reproduce.
inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed0000u + salt); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Analytic centered Gaussian (pi sigma^2)^{-1/2} exp(-r^2/2sigma^2), not renormalized.
inline paraxial::TransverseField analytic_gaussian(int n, double extent, double sigma) {
  paraxial::TransverseField f(n, extent);
  const double a = 1.0 / std::sqrt(pi * sigma * sigma);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = f.coordinate(ix), y = f.coordinate(iy);
      f(ix, iy) = a * std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
    }
  }
  return f;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("paraxial_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
