#pragma once

// NIfTI-1 single-file (.nii / .nii.gz) reader and writer.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "harmbench/error.hpp"
#include "harmbench/gzip.hpp"
#include "harmbench/log.hpp"
#include "harmbench/volume.hpp"

namespace harmbench::nifti {

inline constexpr std::size_t kHeaderSize = 348;
inline constexpr std::size_t kSingleFileOffset = 352;

enum class Datatype : std::int16_t {
  UInt8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
  Float64 = 64,
};

inline int bits_per_voxel(Datatype dt) {
  switch (dt) {
    case Datatype::UInt8: return 8;
    case Datatype::Int16: return 16;
    case Datatype::Int32: return 32;
    case Datatype::Float32: return 32;
    case Datatype::Float64: return 64;
  }
  return 0;
}

inline bool is_supported(std::int16_t code) {
  return code == 2 || code == 4 || code == 8 || code == 16 || code == 64;
}

struct NiftiHeader {
  std::int32_t sizeof_hdr = 348;
  std::array<std::int16_t, 8> dim{};
  std::int16_t datatype = 0;
  std::int16_t bitpix = 0;
  std::array<float, 8> pixdim{};
  float vox_offset = 0;
  float scl_slope = 0;
  float scl_inter = 0;
  std::array<char, 80> descrip{};
  Orientation orientation;
  std::array<char, 4> magic{};
  std::endian byte_order = std::endian::little;
};

namespace detail {

// Header field byte offsets within the 348-byte block.
inline constexpr std::size_t kOffSizeofHdr = 0;
inline constexpr std::size_t kOffDim = 40;
inline constexpr std::size_t kOffDatatype = 70;
inline constexpr std::size_t kOffBitpix = 72;
inline constexpr std::size_t kOffPixdim = 76;
inline constexpr std::size_t kOffVoxOffset = 108;
inline constexpr std::size_t kOffSclSlope = 112;
inline constexpr std::size_t kOffSclInter = 116;
inline constexpr std::size_t kOffDescrip = 148;
inline constexpr std::size_t kOffQformCode = 252;
inline constexpr std::size_t kOffSformCode = 254;
inline constexpr std::size_t kOffQuatern = 256;
inline constexpr std::size_t kOffQoffset = 268;
inline constexpr std::size_t kOffSrow = 280;
inline constexpr std::size_t kOffMagic = 344;

template <typename T>
T read_as(const std::uint8_t* p, std::endian order) {
  std::array<std::uint8_t, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if (order != std::endian::native) std::reverse(buf.begin(), buf.end());
  return std::bit_cast<T>(buf);
}

template <typename T>
void write_as(std::uint8_t* p, T value, std::endian order) {
  auto buf = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
  if (order != std::endian::native) std::reverse(buf.begin(), buf.end());
  std::memcpy(p, buf.data(), sizeof(T));
}

inline std::endian other(std::endian e) {
  return e == std::endian::little ? std::endian::big : std::endian::little;
}

}  // namespace detail

/// Parses and validates the 348-byte header. Byte order is inferred from sizeof_hdr.
inline NiftiHeader parse_header(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  if (bytes.size() < kHeaderSize)
    throw Error(Errc::MalformedHeader, "file shorter than the 348-byte header");
  const std::uint8_t* p = bytes.data();

  NiftiHeader h;
  if (read_as<std::int32_t>(p + kOffSizeofHdr, std::endian::little) == 348) {
    h.byte_order = std::endian::little;
  } else if (read_as<std::int32_t>(p + kOffSizeofHdr, std::endian::big) == 348) {
    h.byte_order = std::endian::big;
  } else {
    throw Error(Errc::MalformedHeader, "sizeof_hdr is not 348 in either byte order");
  }
  const auto order = h.byte_order;

  std::memcpy(h.magic.data(), p + kOffMagic, 4);
  if (std::memcmp(h.magic.data(), "ni1\0", 4) == 0)
    throw Error(Errc::MalformedHeader, "paired .hdr/.img files are not supported");
  if (std::memcmp(h.magic.data(), "n+1\0", 4) != 0) throw Error(Errc::MalformedHeader, "bad magic");

  for (std::size_t k = 0; k < 8; ++k) h.dim[k] = read_as<std::int16_t>(p + kOffDim + 2 * k, order);
  for (std::size_t k = 0; k < 8; ++k) h.pixdim[k] = read_as<float>(p + kOffPixdim + 4 * k, order);
  h.datatype = read_as<std::int16_t>(p + kOffDatatype, order);
  h.bitpix = read_as<std::int16_t>(p + kOffBitpix, order);
  h.vox_offset = read_as<float>(p + kOffVoxOffset, order);
  h.scl_slope = read_as<float>(p + kOffSclSlope, order);
  h.scl_inter = read_as<float>(p + kOffSclInter, order);
  std::memcpy(h.descrip.data(), p + kOffDescrip, 80);
  h.orientation.qform_code = read_as<std::int16_t>(p + kOffQformCode, order);
  h.orientation.sform_code = read_as<std::int16_t>(p + kOffSformCode, order);
  for (std::size_t k = 0; k < 3; ++k) {
    h.orientation.quatern[k] = read_as<float>(p + kOffQuatern + 4 * k, order);
    h.orientation.qoffset[k] = read_as<float>(p + kOffQoffset + 4 * k, order);
  }
  for (std::size_t k = 0; k < 12; ++k) h.orientation.srow[k] = read_as<float>(p + kOffSrow + 4 * k, order);

  const int rank = h.dim[0];
  if (rank < 1 || rank > 7) throw Error(Errc::MalformedHeader, "dim[0] must be in 1..7");
  for (int k = 1; k <= rank; ++k)
    if (h.dim[k] < 1) throw Error(Errc::MalformedHeader, "dim[" + std::to_string(k) + "] must be >= 1");
  for (int k = 1; k <= std::min(rank, 3); ++k)
    if (!(std::isfinite(h.pixdim[k]) && h.pixdim[k] > 0))
      throw Error(Errc::MalformedHeader, "pixdim[" + std::to_string(k) + "] must be > 0");

  if (!is_supported(h.datatype))
    throw Error(Errc::UnsupportedDatatype, "datatype code " + std::to_string(h.datatype));
  if (h.bitpix != bits_per_voxel(static_cast<Datatype>(h.datatype)))
    throw Error(Errc::MalformedHeader, "bitpix inconsistent with datatype");

  if (!std::isfinite(h.vox_offset) || h.vox_offset < static_cast<float>(kHeaderSize) ||
      h.vox_offset != std::floor(h.vox_offset))
    throw Error(Errc::MalformedHeader, "invalid vox_offset");
  return h;
}

/// Decodes a full single-file image (plain or gzip bytes) into a VoxelGrid.
inline VoxelGrid decode(std::span<const std::uint8_t> raw) {
  std::vector<std::uint8_t> inflated;
  std::span<const std::uint8_t> bytes = raw;
  if (gzip::has_gzip_magic(raw)) {
    inflated = gzip::decompress(raw);
    bytes = inflated;
  }
  const NiftiHeader h = parse_header(bytes);
  const int rank = h.dim[0];
  auto extent = [&](int k) -> std::size_t { return k <= rank ? static_cast<std::size_t>(h.dim[k]) : 1; };
  const Dims3 dims{extent(1), extent(2), extent(3)};
  std::size_t channels = 1;
  for (int k = 4; k <= rank; ++k) channels *= extent(k);
  auto spacing_of = [&](int k) -> double { return k <= rank ? static_cast<double>(h.pixdim[k]) : 1.0; };
  const Spacing3 spacing{spacing_of(1), spacing_of(2), spacing_of(3)};

  const std::size_t n = dims.count() * channels;
  const std::size_t width = static_cast<std::size_t>(h.bitpix) / 8;
  const auto offset = static_cast<std::size_t>(h.vox_offset);
  if (bytes.size() < offset || bytes.size() - offset < n * width)
    throw Error(Errc::TruncatedData, "expected " + std::to_string(n * width) + " data bytes");

  const bool scaled = std::isfinite(h.scl_slope) && h.scl_slope != 0.0f;
  const double slope = scaled ? h.scl_slope : 1.0;
  const double inter = scaled && std::isfinite(h.scl_inter) ? h.scl_inter : 0.0;
  if (scaled && h.scl_slope != 1.0f)
    warn("applying scl_slope=" + std::to_string(h.scl_slope) + " scl_inter=" + std::to_string(h.scl_inter));

  std::vector<double> values(n);
  const std::uint8_t* data = bytes.data() + offset;
  const auto order = h.byte_order;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* q = data + i * width;
    double v = 0;
    switch (static_cast<Datatype>(h.datatype)) {
      case Datatype::UInt8: v = q[0]; break;
      case Datatype::Int16: v = detail::read_as<std::int16_t>(q, order); break;
      case Datatype::Int32: v = detail::read_as<std::int32_t>(q, order); break;
      case Datatype::Float32: v = detail::read_as<float>(q, order); break;
      case Datatype::Float64: v = detail::read_as<double>(q, order); break;
    }
    v = scaled ? slope * v + inter : v;
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteVoxel, "voxel " + std::to_string(i) + " is not finite");
    values[i] = v;
  }
  return VoxelGrid(dims, spacing, std::move(values), channels, h.orientation);
}

struct EncodeOptions {
  Datatype datatype = Datatype::Float32;
  std::endian byte_order = std::endian::little;
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
};

/// Encodes a grid as an uncompressed single-file image (header, 4-byte extension flag, data).
/// Integer datatypes store round((v - scl_inter) / scl_slope) and reject values out of range.
inline std::vector<std::uint8_t> encode(const VoxelGrid& grid, const EncodeOptions& opt = {}) {
  using namespace detail;
  const int width = bits_per_voxel(opt.datatype) / 8;
  const std::size_t n = grid.values().size();
  std::vector<std::uint8_t> out(kSingleFileOffset + n * static_cast<std::size_t>(width), 0);
  std::uint8_t* p = out.data();
  const auto order = opt.byte_order;

  write_as<std::int32_t>(p + kOffSizeofHdr, 348, order);
  const auto& d = grid.dims();
  const std::array<std::int64_t, 4> extents{static_cast<std::int64_t>(d.nx), static_cast<std::int64_t>(d.ny),
                                            static_cast<std::int64_t>(d.nz),
                                            static_cast<std::int64_t>(grid.channels())};
  for (auto e : extents)
    if (e > 32767) throw Error(Errc::InvalidArgument, "extent exceeds NIfTI-1 limit of 32767");
  const std::int16_t rank = grid.channels() > 1 ? 4 : 3;
  std::array<std::int16_t, 8> dim{rank, static_cast<std::int16_t>(d.nx), static_cast<std::int16_t>(d.ny),
                                  static_cast<std::int16_t>(d.nz), static_cast<std::int16_t>(grid.channels()),
                                  1, 1, 1};
  for (std::size_t k = 0; k < 8; ++k) write_as<std::int16_t>(p + kOffDim + 2 * k, dim[k], order);
  write_as<std::int16_t>(p + kOffDatatype, static_cast<std::int16_t>(opt.datatype), order);
  write_as<std::int16_t>(p + kOffBitpix, static_cast<std::int16_t>(width * 8), order);
  const auto& s = grid.spacing();
  std::array<float, 8> pixdim{1.0f, static_cast<float>(s.sx), static_cast<float>(s.sy), static_cast<float>(s.sz),
                              1.0f, 1.0f, 1.0f, 1.0f};
  for (std::size_t k = 0; k < 8; ++k) write_as<float>(p + kOffPixdim + 4 * k, pixdim[k], order);
  write_as<float>(p + kOffVoxOffset, static_cast<float>(kSingleFileOffset), order);
  write_as<float>(p + kOffSclSlope, opt.scl_slope, order);
  write_as<float>(p + kOffSclInter, opt.scl_inter, order);
  p[123] = 2;  // xyzt_units: mm
  const auto& o = grid.orientation();
  write_as<std::int16_t>(p + kOffQformCode, o.qform_code, order);
  write_as<std::int16_t>(p + kOffSformCode, o.sform_code, order);
  for (std::size_t k = 0; k < 3; ++k) {
    write_as<float>(p + kOffQuatern + 4 * k, o.quatern[k], order);
    write_as<float>(p + kOffQoffset + 4 * k, o.qoffset[k], order);
  }
  for (std::size_t k = 0; k < 12; ++k) write_as<float>(p + kOffSrow + 4 * k, o.srow[k], order);
  std::memcpy(p + kOffMagic, "n+1\0", 4);

  const double slope = opt.scl_slope != 0.0f ? opt.scl_slope : 1.0;
  const double inter = opt.scl_slope != 0.0f ? opt.scl_inter : 0.0;
  std::uint8_t* data = p + kSingleFileOffset;
  auto stored_int = [&](double v, double lo, double hi) {
    const double r = std::round((v - inter) / slope);
    if (r < lo || r > hi) throw Error(Errc::InvalidArgument, "value out of range for integer datatype");
    return r;
  };
  const auto vals = grid.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t* q = data + i * static_cast<std::size_t>(width);
    const double v = vals[i];
    switch (opt.datatype) {
      case Datatype::UInt8: q[0] = static_cast<std::uint8_t>(stored_int(v, 0, 255)); break;
      case Datatype::Int16:
        write_as<std::int16_t>(q, static_cast<std::int16_t>(stored_int(v, -32768, 32767)), order);
        break;
      case Datatype::Int32:
        write_as<std::int32_t>(q, static_cast<std::int32_t>(stored_int(v, -2147483648.0, 2147483647.0)), order);
        break;
      case Datatype::Float32: write_as<float>(q, static_cast<float>((v - inter) / slope), order); break;
      case Datatype::Float64: write_as<double>(q, (v - inter) / slope, order); break;
    }
  }
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoFailure, "read error on " + path.string());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoFailure, "write error on " + path.string());
}

inline bool has_gz_suffix(const std::filesystem::path& path) { return path.extension() == ".gz"; }

}  // namespace harmbench::nifti

namespace harmbench {

/// Loads a .nii or .nii.gz file. Compression is detected from content, not the file name.
inline VoxelGrid load_volume(const std::filesystem::path& path) {
  const auto bytes = nifti::read_file_bytes(path);
  return nifti::decode(bytes);
}

/// Writes float32 single-file NIfTI-1; gzip-compressed when the path ends in ".gz".
inline void write_volume(const VoxelGrid& grid, const std::filesystem::path& path,
                         const nifti::EncodeOptions& opt = {}) {
  auto bytes = nifti::encode(grid, opt);
  if (nifti::has_gz_suffix(path)) bytes = gzip::compress(bytes);
  nifti::write_file_bytes(path, bytes);
}

inline LabelVolume load_label_volume(const std::filesystem::path& path, const Legend& names = {}) {
  return to_label_volume(load_volume(path), names);
}

inline void write_label_volume(const LabelVolume& seg, const std::filesystem::path& path) {
  std::vector<double> v(seg.labels().begin(), seg.labels().end());
  write_volume(VoxelGrid(seg.dims(), seg.spacing(), std::move(v)), path,
               {.datatype = nifti::Datatype::Int32});
}

}  // namespace harmbench
