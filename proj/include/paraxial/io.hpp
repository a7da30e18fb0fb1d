#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "paraxial/core.hpp"
#include "paraxial/field.hpp"
#include "paraxial/moments.hpp"

namespace paraxial {

inline constexpr std::string_view trajectory_header = "u,r2,w2,Q,K,V,U,H0,MI4,invR";

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// One row per sample; invR = eps Q / (k r2). Numbers use 17 significant digits.
std::string trajectory_csv(const MomentTrajectory& trajectory, const ParaxialParams& params);

/// Field snapshot layout, little-endian throughout:
///   uint64 n, float64 extent, float64 u, then n*n (float64 re, float64 im)
///   pairs in row-major order (index iy * n + ix).
std::string encode_field(const TransverseField& field, double u);
void write_field_binary(const std::filesystem::path& path, const TransverseField& field, double u);

struct FieldFile {
  TransverseField field;
  double u = 0.0;
};
FieldFile decode_field(std::string_view bytes);
FieldFile read_field_binary(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace paraxial
