#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "harmbench/error.hpp"
#include "harmbench/volume.hpp"

namespace harmbench {

/// Background removal rule. Threshold mode keeps voxels strictly above `threshold`;
/// mask mode keeps voxels whose mask label is nonzero.
struct ForegroundPolicy {
  enum class Mode { Threshold, ExplicitMask };

  Mode mode = Mode::Threshold;
  double threshold = 0.0;
  std::shared_ptr<const LabelVolume> mask;

  static ForegroundPolicy above(double threshold) { return {Mode::Threshold, threshold, nullptr}; }
  static ForegroundPolicy masked(std::shared_ptr<const LabelVolume> m) {
    return {Mode::ExplicitMask, 0.0, std::move(m)};
  }
};

/// Per-voxel foreground flags for a single-channel view of `dims.count()` values.
inline std::vector<std::uint8_t> foreground_flags(std::span<const double> values, const Dims3& dims,
                                                  const ForegroundPolicy& policy) {
  std::vector<std::uint8_t> fg(values.size(), 0);
  if (policy.mode == ForegroundPolicy::Mode::ExplicitMask) {
    if (!policy.mask) throw Error(Errc::InvalidArgument, "mask policy without a mask");
    if (!(policy.mask->dims() == dims)) throw Error(Errc::DimsMismatch, "foreground mask dims differ from image");
    const auto labels = policy.mask->labels();
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = labels[i] != 0;
  } else {
    if (!std::isfinite(policy.threshold)) throw Error(Errc::InvalidArgument, "threshold must be finite");
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = values[i] > policy.threshold;
  }
  return fg;
}

inline std::vector<std::uint8_t> foreground_flags(const VoxelGrid& grid, const ForegroundPolicy& policy) {
  if (grid.channels() != 1) throw Error(Errc::InvalidArgument, "select a channel before background removal");
  return foreground_flags(grid.values(), grid.dims(), policy);
}

/// Sorted samples with positive weights summing to one.
class EmpiricalDistribution {
 public:
  /// Equal-weight distribution over `samples` (any order).
  static EmpiricalDistribution uniform(std::vector<double> samples) {
    if (samples.empty()) throw Error(Errc::EmptyForeground, "distribution needs at least one sample");
    for (double v : samples)
      if (!std::isfinite(v)) throw Error(Errc::NonFiniteVoxel, "non-finite sample");
    std::sort(samples.begin(), samples.end());
    const double w = 1.0 / static_cast<double>(samples.size());
    EmpiricalDistribution d;
    d.weights_.assign(samples.size(), w);
    d.values_ = std::move(samples);
    d.uniform_ = true;
    return d;
  }

  /// Weighted distribution; weights are normalized to sum to one.
  static EmpiricalDistribution weighted(std::vector<double> values, std::vector<double> weights) {
    if (values.empty()) throw Error(Errc::EmptyForeground, "distribution needs at least one sample");
    if (values.size() != weights.size()) throw Error(Errc::LengthMismatch, "values and weights differ in length");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    double total = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw Error(Errc::NonFiniteVoxel, "non-finite sample");
      if (!(weights[i] > 0) || !std::isfinite(weights[i]))
        throw Error(Errc::InvalidArgument, "weights must be positive and finite");
      total += weights[i];
    }
    EmpiricalDistribution d;
    d.values_.reserve(values.size());
    d.weights_.reserve(values.size());
    for (auto k : order) {
      d.values_.push_back(values[k]);
      d.weights_.push_back(weights[k] / total);
    }
    return d;
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> weights() const noexcept { return weights_; }
  bool is_uniform() const noexcept { return uniform_; }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

  /// Same weights, every value mapped through `f` (must be nondecreasing).
  template <typename F>
  EmpiricalDistribution transformed(F&& f) const {
    EmpiricalDistribution d = *this;
    for (auto& v : d.values_) v = f(v);
    return d;
  }

 private:
  EmpiricalDistribution() = default;

  std::vector<double> values_;
  std::vector<double> weights_;
  bool uniform_ = false;
};

/// Background removal: the sorted foreground intensities with equal weights.
inline EmpiricalDistribution extract_foreground(const VoxelGrid& grid, const ForegroundPolicy& policy = {}) {
  const auto fg = foreground_flags(grid, policy);
  const auto values = grid.values();
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(std::count(fg.begin(), fg.end(), 1)));
  for (std::size_t i = 0; i < fg.size(); ++i)
    if (fg[i]) samples.push_back(values[i]);
  if (samples.empty()) throw Error(Errc::EmptyForeground, "no voxel passes the foreground policy");
  return EmpiricalDistribution::uniform(std::move(samples));
}

struct Histogram {
  std::vector<double> edges;   // bins + 1, strictly ascending
  std::vector<double> counts;  // total weight per bin

  std::size_t bins() const noexcept { return counts.size(); }
};

/// Bins a distribution into `bins` equal-width bins over [lo, hi]. Bins are half-open
/// except the last; samples outside the range land in the boundary bins.
inline Histogram to_histogram(const EmpiricalDistribution& dist, std::size_t bins, double lo, double hi) {
  if (bins == 0) throw Error(Errc::InvalidRange, "bin count must be positive");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw Error(Errc::InvalidRange, "need lo < hi");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges[bins] = hi;
  h.counts.assign(bins, 0.0);
  const auto vals = dist.values();
  const auto ws = dist.weights();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double pos = (vals[i] - lo) / width;
    std::size_t k = 0;
    if (pos >= static_cast<double>(bins)) {
      k = bins - 1;
    } else if (pos > 0) {
      k = static_cast<std::size_t>(pos);
      // Guard against rounding at bin edges.
      if (k + 1 < bins && vals[i] >= h.edges[k + 1]) ++k;
      if (k > 0 && vals[i] < h.edges[k]) --k;
    }
    h.counts[k] += ws[i];
  }
  return h;
}

}  // namespace harmbench
