#pragma once

// Seeded two-structure phantoms under per-site intensity maps, plus a histogram-matching
// harmonizer whose behaviour is known exactly (monotone, foreground-preserving).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "harmbench/csv.hpp"
#include "harmbench/distribution.hpp"
#include "harmbench/error.hpp"
#include "harmbench/nifti.hpp"
#include "harmbench/volume.hpp"

namespace harmbench::synth {

/// Counter-based generator: sample k of stream `seed` is splitmix64(seed * kStreamMul + k).
/// Pure integer arithmetic, so fixtures are identical on every platform.
struct CounterRng {
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ULL;
  static constexpr std::uint64_t kMix2 = 0x94D049BB133111EBULL;
  static constexpr std::uint64_t kStreamMul = 0xD1B54A32D192ED03ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += kGolden;
    z = (z ^ (z >> 30)) * kMix1;
    z = (z ^ (z >> 27)) * kMix2;
    return z ^ (z >> 31);
  }

  std::uint64_t seed = 0;

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept { return mix(seed * kStreamMul + counter); }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on counters 2k and 2k+1.
  double normal(std::uint64_t k) const noexcept {
    const double u1 = uniform(2 * k), u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

/// Monotone foreground intensity map v -> gain * v^gamma + bias.
struct SiteTransform {
  double gain = 1.0;
  double bias = 0.0;
  double gamma = 1.0;

  bool is_identity() const noexcept { return gain == 1.0 && bias == 0.0 && gamma == 1.0; }
};

struct Sphere {
  std::uint32_t label = 1;
  std::string name;
  double cx = 0, cy = 0, cz = 0;  // voxel coordinates
  double radius = 1;              // voxels
  double mean = 0.5;
  double std = 0.05;
};

struct PhantomSpec {
  Dims3 dims{32, 32, 32};
  Spacing3 spacing{};
  std::uint64_t seed = 0;
  std::vector<Sphere> structures;
  SiteTransform site;
  /// Foreground values are clipped below at this floor so background stays the only zero.
  double floor = 1e-3;

  void validate() const {
    if (dims.count() == 0) throw Error(Errc::InvalidArgument, "phantom dims must be positive");
    if (!(site.gain > 0 && site.gamma > 0)) throw Error(Errc::InvalidArgument, "gain and gamma must be positive");
    if (!(floor > 0)) throw Error(Errc::InvalidArgument, "floor must be positive");
    for (const auto& s : structures) {
      if (s.label == 0) throw Error(Errc::InvalidArgument, "structure label 0 is reserved for background");
      if (!(s.radius > 0)) throw Error(Errc::InvalidArgument, "sphere radius must be positive");
      auto inside = [&](double c, std::size_t n) { return c - s.radius >= 0 && c + s.radius <= double(n - 1); };
      if (!inside(s.cx, dims.nx) || !inside(s.cy, dims.ny) || !inside(s.cz, dims.nz))
        throw Error(Errc::InvalidArgument, "sphere '" + s.name + "' extends outside the volume");
      if (!(s.std >= 0)) throw Error(Errc::InvalidArgument, "intensity std must be nonnegative");
    }
  }
};

inline bool sphere_contains(const Sphere& s, std::size_t x, std::size_t y, std::size_t z) noexcept {
  const double dx = double(x) - s.cx, dy = double(y) - s.cy, dz = double(z) - s.cz;
  return dx * dx + dy * dy + dz * dz <= s.radius * s.radius;
}

inline double apply_site(const SiteTransform& t, double v, double floor) {
  const double mapped = t.gain * std::pow(std::max(v, floor), t.gamma) + t.bias;
  return std::max(mapped, floor);
}

struct Phantom {
  VoxelGrid image;
  LabelVolume labels;
};

/// Deterministic in `spec`: voxel i of structure k gets mean_k + std_k * N_i, then the site map.
inline Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Dims3& d = spec.dims;
  std::vector<std::uint32_t> labels(d.count(), 0);
  std::vector<double> values(d.count(), 0.0);
  const CounterRng rng{spec.seed};
  Legend legend;
  for (const auto& s : spec.structures) legend[s.label] = s.name.empty() ? default_label_name(s.label) : s.name;

  for (std::size_t z = 0; z < d.nz; ++z)
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t i = d.index(x, y, z);
        const Sphere* hit = nullptr;
        for (const auto& s : spec.structures) {
          if (!sphere_contains(s, x, y, z)) continue;
          if (hit)
            throw Error(Errc::OverlappingStructures,
                        "structures '" + hit->name + "' and '" + s.name + "' overlap");
          hit = &s;
        }
        if (!hit) continue;
        labels[i] = hit->label;
        values[i] = apply_site(spec.site, hit->mean + hit->std * rng.normal(i), spec.floor);
      }
  return {VoxelGrid(d, spec.spacing, std::move(values)), LabelVolume(d, spec.spacing, std::move(labels), legend)};
}

/// Two non-overlapping spheres standing in for grey and white matter, scaled to `size`.
inline std::vector<Sphere> brain_like_structures(std::size_t size) {
  const double n = double(size);
  return {
      {1, "GM", 0.30 * n, 0.5 * n, 0.5 * n, 0.18 * n, 0.45, 0.06},
      {2, "WM", 0.70 * n, 0.5 * n, 0.5 * n, 0.16 * n, 0.75, 0.04},
  };
}

/// Site k's scanner map; site 0 is the identity.
inline SiteTransform site_transform(std::size_t k) {
  const double s = double(k);
  return {1.0 + 0.6 * s, 0.05 * s, 1.0 + 0.25 * s};
}

inline std::string site_name(std::size_t k) {
  std::string name;
  do {
    name.insert(name.begin(), char('A' + k % 26));
    k /= 26;
  } while (k-- > 0);
  return name;
}

/// Remaps the source foreground through F_ref^-1(F_src(v)). Source ranks use average
/// ranks for ties, the reference inverse CDF is piecewise linear. Background is untouched.
inline VoxelGrid histogram_match(const VoxelGrid& source, const VoxelGrid& reference,
                                 const ForegroundPolicy& policy = {}) {
  const auto ref_dist = extract_foreground(reference, policy);
  const auto ref = ref_dist.values();
  const auto fg = foreground_flags(source, policy);
  const auto sv = source.values();

  std::vector<double> src;
  for (std::size_t i = 0; i < fg.size(); ++i)
    if (fg[i]) src.push_back(sv[i]);
  if (src.empty()) throw Error(Errc::EmptyForeground, "source has no foreground");
  std::sort(src.begin(), src.end());

  // Source sample with doubled mid-rank m2 sits at quantile (m2 + 1) / (2 n_src); reference
  // sample k sits at (2k + 1) / (2 n_ref). Positions are kept as exact integer fractions.
  const auto n_src = static_cast<std::int64_t>(src.size());
  const auto n_ref = static_cast<std::int64_t>(ref.size());
  auto ref_quantile = [&](std::int64_t m2) {
    const std::int64_t num = std::max<std::int64_t>((m2 + 1) * n_ref - n_src, 0);
    const std::int64_t den = 2 * n_src;
    const std::int64_t k = num / den;
    if (k + 1 >= n_ref) return ref.back();
    const std::int64_t rem = num % den;
    const auto lo = ref[static_cast<std::size_t>(k)], hi = ref[static_cast<std::size_t>(k + 1)];
    return rem == 0 ? lo : lo + double(rem) / double(den) * (hi - lo);
  };

  std::vector<double> out(sv.begin(), sv.end());
  for (std::size_t i = 0; i < fg.size(); ++i) {
    if (!fg[i]) continue;
    const auto lo = std::lower_bound(src.begin(), src.end(), sv[i]);
    const auto hi = std::upper_bound(lo, src.end(), sv[i]);
    out[i] = ref_quantile((lo - src.begin()) + (hi - src.begin()) - 1);
  }
  return source.with_values(std::move(out));
}

struct DatasetConfig {
  std::size_t sites = 2;
  std::size_t triplets = 10;
  std::uint64_t seed = 42;
  std::size_t size = 64;
  Spacing3 spacing{};
};

inline const std::vector<std::string>& manifest_columns() {
  static const std::vector<std::string> cols{"id",      "input_path",     "target_path",   "pred_path",
                                             "gt_path", "seg_input_path", "seg_pred_path", "site_in",
                                             "site_out", "channel"};
  return cols;
}

/// Writes per-triplet volumes under `out_dir/volumes` plus `out_dir/manifest.csv` and
/// returns the manifest path. Triplet j goes from site j mod S to the next site; the
/// prediction is the input histogram-matched to the target, the ground truth is the
/// input subject re-rendered under the target site's map.
inline std::filesystem::path write_dataset(const std::filesystem::path& out_dir, const DatasetConfig& cfg) {
  if (cfg.sites < 2) throw Error(Errc::InvalidArgument, "need at least 2 sites");
  if (cfg.triplets < 1) throw Error(Errc::InvalidArgument, "need at least 1 triplet");
  if (cfg.size < 8) throw Error(Errc::InvalidArgument, "volume size must be >= 8");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "volumes", ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + (out_dir / "volumes").string());

  const auto structures = brain_like_structures(cfg.size);
  auto spec_for = [&](std::uint64_t subject_seed, std::size_t site) {
    PhantomSpec spec;
    spec.dims = {cfg.size, cfg.size, cfg.size};
    spec.spacing = cfg.spacing;
    spec.seed = subject_seed;
    spec.structures = structures;
    spec.site = site_transform(site);
    return spec;
  };

  const fs::path manifest = out_dir / "manifest.csv";
  std::ofstream os(manifest, std::ios::trunc);
  if (!os) throw Error(Errc::IoFailure, "cannot write " + manifest.string());
  csv::write_row(os, manifest_columns());

  for (std::size_t j = 0; j < cfg.triplets; ++j) {
    const std::size_t s_in = j % cfg.sites;
    const std::size_t s_out = (s_in + 1 + (j / cfg.sites) % (cfg.sites - 1)) % cfg.sites;
    const std::uint64_t input_seed = CounterRng::mix(cfg.seed * 2 + 0) ^ (j + 1);
    const std::uint64_t target_seed = CounterRng::mix(cfg.seed * 2 + 1) ^ (j + 1);

    const auto input = generate_phantom(spec_for(input_seed, s_in));
    const auto target = generate_phantom(spec_for(target_seed, s_out));
    const auto gt = generate_phantom(spec_for(input_seed, s_out));
    const auto pred = histogram_match(input.image, target.image);

    // The prediction's segmentation: input labels restricted to the prediction's foreground.
    std::vector<std::uint32_t> seg_pred(input.labels.labels().begin(), input.labels.labels().end());
    const auto pv = pred.values();
    for (std::size_t i = 0; i < seg_pred.size(); ++i)
      if (!(pv[i] > 0)) seg_pred[i] = 0;

    char id[32];
    std::snprintf(id, sizeof id, "t%03zu", j);
    const std::string base = std::string("volumes/") + id;
    write_volume(input.image, out_dir / (base + "_input.nii"));
    write_volume(target.image, out_dir / (base + "_target.nii"));
    write_volume(pred, out_dir / (base + "_pred.nii"));
    write_volume(gt.image, out_dir / (base + "_gt.nii"));
    write_label_volume(input.labels, out_dir / (base + "_seg_input.nii"));
    write_label_volume(LabelVolume(input.labels.dims(), input.labels.spacing(), std::move(seg_pred),
                                   input.labels.legend()),
                       out_dir / (base + "_seg_pred.nii"));
    csv::write_row(os, {id, base + "_input.nii", base + "_target.nii", base + "_pred.nii", base + "_gt.nii",
                        base + "_seg_input.nii", base + "_seg_pred.nii", site_name(s_in), site_name(s_out), ""});
  }
  if (!os) throw Error(Errc::IoFailure, "write error on " + manifest.string());
  return manifest;
}

}  // namespace harmbench::synth
