#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace harmbench {

enum class Errc {
  // volume_io
  MalformedHeader,
  UnsupportedDatatype,
  TruncatedData,
  NonFiniteVoxel,
  IoFailure,
  // distribution
  EmptyForeground,
  InvalidRange,
  // metrics_wd
  DegenerateNormalizer,
  // metrics_anatomy
  ZeroInputVolume,
  NoCommonStructures,
  InvalidLabel,
  // metrics_reference
  DimsMismatch,
  DegenerateRange,
  // stats
  AllSentinels,
  LengthMismatch,
  ZeroRankVariance,
  // harness
  MissingColumn,
  DuplicateId,
  UnreadableFile,
  NoSuccessfulRows,
  UnsupportedFormat,
  // synth
  OverlappingStructures,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedDatatype: return "UnsupportedDatatype";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::NonFiniteVoxel: return "NonFiniteVoxel";
    case Errc::IoFailure: return "IoFailure";
    case Errc::EmptyForeground: return "EmptyForeground";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::DegenerateNormalizer: return "DegenerateNormalizer";
    case Errc::ZeroInputVolume: return "ZeroInputVolume";
    case Errc::NoCommonStructures: return "NoCommonStructures";
    case Errc::InvalidLabel: return "InvalidLabel";
    case Errc::DimsMismatch: return "DimsMismatch";
    case Errc::DegenerateRange: return "DegenerateRange";
    case Errc::AllSentinels: return "AllSentinels";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroRankVariance: return "ZeroRankVariance";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnreadableFile: return "UnreadableFile";
    case Errc::NoSuccessfulRows: return "NoSuccessfulRows";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::OverlappingStructures: return "OverlappingStructures";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying one typed code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace harmbench
