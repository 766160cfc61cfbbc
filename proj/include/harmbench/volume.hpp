#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "harmbench/error.hpp"

namespace harmbench {

struct Dims3 {
  std::size_t nx = 1, ny = 1, nz = 1;

  std::size_t count() const noexcept { return nx * ny * nz; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + nx * (y + ny * z);
  }
  friend bool operator==(const Dims3&, const Dims3&) = default;
};

/// Voxel edge lengths in millimetres.
struct Spacing3 {
  double sx = 1.0, sy = 1.0, sz = 1.0;

  double voxel_volume() const noexcept { return sx * sy * sz; }
  friend bool operator==(const Spacing3&, const Spacing3&) = default;
};

/// qform/sform fields carried through load/write untouched. No metric reads them.
struct Orientation {
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  std::array<float, 3> quatern{};
  std::array<float, 3> qoffset{};
  std::array<float, 12> srow{};
  friend bool operator==(const Orientation&, const Orientation&) = default;
};

/// Immutable 3-D scalar volume, x-fastest layout, channels stored as consecutive blocks.
class VoxelGrid {
 public:
  VoxelGrid(Dims3 dims, Spacing3 spacing, std::vector<double> values, std::size_t channels = 1,
            Orientation orientation = {})
      : dims_(dims),
        spacing_(spacing),
        channels_(channels),
        orientation_(orientation),
        values_(std::move(values)) {
    if (dims_.nx == 0 || dims_.ny == 0 || dims_.nz == 0)
      throw Error(Errc::InvalidArgument, "volume dimensions must be positive");
    if (channels_ == 0) throw Error(Errc::InvalidArgument, "channel count must be positive");
    if (!(spacing_.sx > 0 && spacing_.sy > 0 && spacing_.sz > 0))
      throw Error(Errc::InvalidArgument, "voxel spacing must be positive");
    if (values_.size() != dims_.count() * channels_)
      throw Error(Errc::InvalidArgument, "value count does not match dims x channels");
    for (double v : values_)
      if (!std::isfinite(v)) throw Error(Errc::NonFiniteVoxel, "volume contains NaN or Inf");
  }

  const Dims3& dims() const noexcept { return dims_; }
  const Spacing3& spacing() const noexcept { return spacing_; }
  std::size_t channels() const noexcept { return channels_; }
  const Orientation& orientation() const noexcept { return orientation_; }
  std::size_t voxel_count() const noexcept { return dims_.count(); }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const double> channel_values(std::size_t c) const {
    if (c >= channels_) throw Error(Errc::InvalidArgument, "channel index out of range");
    return std::span<const double>(values_).subspan(c * voxel_count(), voxel_count());
  }

  /// Single-channel copy of channel `c`.
  VoxelGrid channel(std::size_t c) const {
    auto v = channel_values(c);
    return VoxelGrid(dims_, spacing_, std::vector<double>(v.begin(), v.end()), 1, orientation_);
  }

  double at(std::size_t x, std::size_t y, std::size_t z) const { return values_[dims_.index(x, y, z)]; }

  /// Same geometry, new values.
  VoxelGrid with_values(std::vector<double> values) const {
    return VoxelGrid(dims_, spacing_, std::move(values), channels_, orientation_);
  }

 private:
  Dims3 dims_;
  Spacing3 spacing_;
  std::size_t channels_;
  Orientation orientation_;
  std::vector<double> values_;
};

using Legend = std::map<std::uint32_t, std::string>;

inline std::string default_label_name(std::uint32_t label) { return "label-" + std::to_string(label); }

/// Integer segmentation. Label 0 is background and never appears in the legend.
class LabelVolume {
 public:
  LabelVolume(Dims3 dims, Spacing3 spacing, std::vector<std::uint32_t> labels, Legend legend)
      : dims_(dims), spacing_(spacing), labels_(std::move(labels)), legend_(std::move(legend)) {
    if (dims_.count() == 0) throw Error(Errc::InvalidArgument, "label volume dimensions must be positive");
    if (!(spacing_.sx > 0 && spacing_.sy > 0 && spacing_.sz > 0))
      throw Error(Errc::InvalidArgument, "voxel spacing must be positive");
    if (labels_.size() != dims_.count())
      throw Error(Errc::InvalidArgument, "label count does not match dims");
    legend_.erase(0);
    for (auto l : labels_)
      if (l != 0 && !legend_.contains(l))
        throw Error(Errc::InvalidLabel, "label " + std::to_string(l) + " missing from legend");
  }

  const Dims3& dims() const noexcept { return dims_; }
  const Spacing3& spacing() const noexcept { return spacing_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  const Legend& legend() const noexcept { return legend_; }

 private:
  Dims3 dims_;
  Spacing3 spacing_;
  std::vector<std::uint32_t> labels_;
  Legend legend_;
};

/// Converts a scalar grid holding integer codes into a LabelVolume. Labels absent from
/// `names` are named "label-<k>"; names given for labels absent from the data are kept.
inline LabelVolume to_label_volume(const VoxelGrid& grid, const Legend& names = {}) {
  if (grid.channels() != 1) throw Error(Errc::InvalidLabel, "label volume must be single-channel");
  std::vector<std::uint32_t> labels;
  labels.reserve(grid.voxel_count());
  Legend legend = names;
  for (double v : grid.values()) {
    const double r = std::round(v);
    if (r < 0 || std::abs(v - r) > 1e-6 || r > 4294967295.0)
      throw Error(Errc::InvalidLabel, "label values must be nonnegative integers, got " + std::to_string(v));
    const auto l = static_cast<std::uint32_t>(r);
    labels.push_back(l);
    if (l != 0 && !legend.contains(l)) legend.emplace(l, default_label_name(l));
  }
  return LabelVolume(grid.dims(), grid.spacing(), std::move(labels), std::move(legend));
}

}  // namespace harmbench
