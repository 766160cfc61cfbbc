#pragma once

// Paired image-quality metrics (SSIM, PSNR, MAE, MSE) between a prediction and its ground truth.
// Both images are min-max normalized by the joint range over the union foreground, so L = 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "harmbench/distribution.hpp"
#include "harmbench/error.hpp"
#include "harmbench/volume.hpp"

namespace harmbench {

struct SsimParams {
  std::size_t window = 7;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }

  void validate() const {
    if (window < 3 || window % 2 == 0) throw Error(Errc::InvalidArgument, "SSIM window must be odd and >= 3");
    if (!(k1 > 0 && k2 > 0 && dynamic_range > 0))
      throw Error(Errc::InvalidArgument, "SSIM constants must be positive");
  }
};

struct PairedMetricRow {
  double ssim = 0;
  double psnr_db = 0;  // +inf when mse == 0
  double mae = 0;
  double mse = 0;
  std::size_t foreground_voxels = 0;
  std::size_t ssim_windows = 0;
};

inline constexpr double kPsnrSentinel = std::numeric_limits<double>::infinity();

inline double psnr_from_mse(double mse, double dynamic_range = 1.0) {
  if (mse <= 0) return kPsnrSentinel;
  return 10.0 * std::log10(dynamic_range * dynamic_range / mse);
}

namespace detail {

// Sum over each full window of edge `w`, along one axis. `src` has extents `in`; the
// result has that axis shortened by w-1.
inline std::vector<double> box_sum_axis(const std::vector<double>& src, const Dims3& in, int axis, std::size_t w,
                                        Dims3& out_dims) {
  out_dims = in;
  std::size_t* ext = axis == 0 ? &out_dims.nx : axis == 1 ? &out_dims.ny : &out_dims.nz;
  *ext -= w - 1;
  const std::size_t stride = axis == 0 ? 1 : axis == 1 ? in.nx : in.nx * in.ny;
  std::vector<double> out(out_dims.count());
  for (std::size_t z = 0; z < out_dims.nz; ++z)
    for (std::size_t y = 0; y < out_dims.ny; ++y)
      for (std::size_t x = 0; x < out_dims.nx; ++x) {
        const double* p = src.data() + in.index(x, y, z);
        double s = 0;
        for (std::size_t k = 0; k < w; ++k) s += p[k * stride];
        out[out_dims.index(x, y, z)] = s;
      }
  return out;
}

inline std::vector<double> box_sum(const std::vector<double>& src, const Dims3& dims, std::size_t w) {
  Dims3 d1, d2, d3;
  auto a = box_sum_axis(src, dims, 0, w, d1);
  auto b = box_sum_axis(a, d1, 1, w, d2);
  return box_sum_axis(b, d2, 2, w, d3);
}

}  // namespace detail

/// Local SSIM for one window from its first and second moments.
inline double ssim_from_moments(double mx, double my, double vx, double vy, double cxy, double c1, double c2) {
  return ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

inline PairedMetricRow paired_metrics(const VoxelGrid& pred, const VoxelGrid& gt, const ForegroundPolicy& policy = {},
                                      const SsimParams& params = {}) {
  params.validate();
  if (!(pred.dims() == gt.dims()) || pred.channels() != gt.channels())
    throw Error(Errc::DimsMismatch, "prediction and ground truth differ in dims");
  const auto fp = foreground_flags(pred, policy);
  const auto fg_gt = foreground_flags(gt, policy);
  const auto pv = pred.values();
  const auto gv = gt.values();
  const std::size_t n = pv.size();

  std::vector<std::uint8_t> fg(n);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    fg[i] = fp[i] || fg_gt[i];
    if (!fg[i]) continue;
    ++count;
    lo = std::min({lo, pv[i], gv[i]});
    hi = std::max({hi, pv[i], gv[i]});
  }
  if (count == 0) throw Error(Errc::EmptyForeground, "union foreground of the pair is empty");
  if (!(hi > lo)) throw Error(Errc::DegenerateRange, "joint foreground intensity range is zero");

  const double scale = 1.0 / (hi - lo);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (pv[i] - lo) * scale;
    y[i] = (gv[i] - lo) * scale;
  }

  PairedMetricRow row;
  row.foreground_voxels = count;
  double sum_abs = 0, sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fg[i]) continue;
    const double d = x[i] - y[i];
    sum_abs += std::abs(d);
    sum_sq += d * d;
  }
  row.mae = sum_abs / static_cast<double>(count);
  row.mse = sum_sq / static_cast<double>(count);
  row.psnr_db = psnr_from_mse(row.mse, params.dynamic_range);

  const Dims3& dims = pred.dims();
  const std::size_t w = params.window;
  if (dims.nx < w || dims.ny < w || dims.nz < w)
    throw Error(Errc::InvalidArgument, "volume smaller than the SSIM window");
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto sx = detail::box_sum(x, dims, w);
  const auto sy = detail::box_sum(y, dims, w);
  const auto sxx = detail::box_sum(xx, dims, w);
  const auto syy = detail::box_sum(yy, dims, w);
  const auto sxy = detail::box_sum(xy, dims, w);
  const Dims3 out{dims.nx - w + 1, dims.ny - w + 1, dims.nz - w + 1};
  const double inv = 1.0 / static_cast<double>(w * w * w);
  const std::size_t h = w / 2;
  const double c1 = params.c1(), c2 = params.c2();
  double acc = 0;
  std::size_t windows = 0;
  for (std::size_t z = 0; z < out.nz; ++z)
    for (std::size_t yi = 0; yi < out.ny; ++yi)
      for (std::size_t xi = 0; xi < out.nx; ++xi) {
        if (!fg[dims.index(xi + h, yi + h, z + h)]) continue;
        const std::size_t k = out.index(xi, yi, z);
        const double mx = sx[k] * inv, my = sy[k] * inv;
        const double vx = sxx[k] * inv - mx * mx;
        const double vy = syy[k] * inv - my * my;
        const double cxy = sxy[k] * inv - mx * my;
        acc += ssim_from_moments(mx, my, vx, vy, cxy, c1, c2);
        ++windows;
      }
  if (windows == 0) throw Error(Errc::EmptyForeground, "no full SSIM window is centred on foreground");
  row.ssim = acc / static_cast<double>(windows);
  row.ssim_windows = windows;
  return row;
}

}  // namespace harmbench
