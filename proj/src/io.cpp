#include "paraxial/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "paraxial/error.hpp"
#include "paraxial/format.hpp"

namespace paraxial {
namespace {

template <class T>
void put_le(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::string_view bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) fail(ErrorKind::io, "truncated field file");
  unsigned char raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  offset += sizeof(T);
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string trajectory_csv(const MomentTrajectory& trajectory, const ParaxialParams& params) {
  std::string out(trajectory_header);
  out += '\n';
  for (const auto& s : trajectory.samples()) {
    const MomentSet& m = s.moments;
    const double inv_r = m.r2 > 0.0 ? params.epsilon * m.Q / (params.k * m.r2) : 0.0;
    for (double v : {s.u, m.r2, m.w2, m.Q, m.K, m.V, m.U, m.H0, s.mi4}) {
      out += format_double(v);
      out += ',';
    }
    out += format_double(inv_r);
    out += '\n';
  }
  return out;
}

std::string encode_field(const TransverseField& field, double u) {
  std::string out;
  out.reserve(24 + field.values().size() * 16);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(field.size()));
  put_le<double>(out, field.extent());
  put_le<double>(out, u);
  for (const cplx& v : field.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  return out;
}

void write_field_binary(const std::filesystem::path& path, const TransverseField& field, double u) {
  write_file_atomic(path, encode_field(field, u));
}

FieldFile decode_field(std::string_view bytes) {
  std::size_t offset = 0;
  const auto n = get_le<std::uint64_t>(bytes, offset);
  const double extent = get_le<double>(bytes, offset);
  const double u = get_le<double>(bytes, offset);
  if (n == 0 || n > (1u << 16)) fail(ErrorKind::io, "field file has an implausible grid size");
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  if (bytes.size() != 24 + cells * 16) fail(ErrorKind::io, "field file size does not match its header");
  std::vector<cplx> values(cells);
  for (auto& v : values) {
    const double re = get_le<double>(bytes, offset);
    const double im = get_le<double>(bytes, offset);
    v = {re, im};
  }
  return {TransverseField(static_cast<int>(n), extent, std::move(values)), u};
}

FieldFile read_field_binary(const std::filesystem::path& path) { return decode_field(read_text_file(path)); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace paraxial
