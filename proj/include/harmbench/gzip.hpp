#pragma once

#include <zlib.h>

#include <cstdint>
#include <span>
#include <vector>

#include "harmbench/error.hpp"

namespace harmbench::gzip {

inline bool has_gzip_magic(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

/// Inflates a gzip stream, including multi-member streams.
/// Truncated input maps to TruncatedData, corrupt input to MalformedHeader.
inline std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> in) {
  std::vector<std::uint8_t> out;
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw Error(Errc::IoFailure, "zlib init failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::uint8_t chunk[1 << 16];
  int rc = Z_OK;
  while (true) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (rc == Z_STREAM_END) {
      // Concatenated members: keep going while gzip magic follows.
      if (zs.avail_in >= 2 && zs.next_in[0] == 0x1F && zs.next_in[1] == 0x8B) {
        inflateReset(&zs);
        continue;
      }
      break;
    }
    if (rc == Z_OK) continue;
    if (rc == Z_BUF_ERROR && zs.avail_in == 0) {
      inflateEnd(&zs);
      throw Error(Errc::TruncatedData, "gzip stream ended prematurely");
    }
    inflateEnd(&zs);
    throw Error(Errc::MalformedHeader, "corrupt gzip stream");
  }
  inflateEnd(&zs);
  return out;
}

inline std::vector<std::uint8_t> compress(std::span<const std::uint8_t> in, int level = 6) {
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, 16 + MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error(Errc::IoFailure, "zlib init failed");
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(in.size())) + 32);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(Errc::IoFailure, "gzip compression failed");
  out.resize(zs.total_out);
  return out;
}

}  // namespace harmbench::gzip
