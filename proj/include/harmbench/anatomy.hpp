#pragma once

// Anatomy preservation: AP(i,p) = 1 - |vol(p) - vol(i)| / vol(i) per segmented structure.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "harmbench/error.hpp"
#include "harmbench/volume.hpp"

namespace harmbench {

struct StructureVolume {
  std::uint32_t label = 0;
  std::string name;
  std::size_t voxels = 0;
  double volume_mm3 = 0;
};

/// One entry per legend label, in label order. Labels with no voxels report zero volume.
inline std::vector<StructureVolume> structure_volumes(const LabelVolume& seg) {
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& [label, _] : seg.legend()) counts[label] = 0;
  for (auto l : seg.labels())
    if (l != 0) ++counts[l];
  const double voxel = seg.spacing().voxel_volume();
  std::vector<StructureVolume> out;
  out.reserve(counts.size());
  for (const auto& [label, n] : counts)
    out.push_back({label, seg.legend().at(label), n, static_cast<double>(n) * voxel});
  return out;
}

struct StructureAp {
  std::uint32_t label = 0;
  std::string name;
  double vol_input = 0;
  double vol_pred = 0;
  double ap = 0;
};

struct ApReport {
  std::vector<StructureAp> per_structure;
  double mean_ap = 0;
  bool weighted = false;
  /// Structures whose volume more than doubled (AP < 0).
  std::vector<std::string> negative;
  std::vector<std::string> warnings;

  const StructureAp* find(const std::string& name) const {
    for (const auto& s : per_structure)
      if (s.name == name) return &s;
    return nullptr;
  }
};

struct ApOptions {
  /// Weight structures by input volume instead of the plain average.
  bool weighted = false;
};

inline double anatomy_preservation_value(double vol_input, double vol_pred) {
  return 1.0 - std::abs(vol_pred - vol_input) / vol_input;
}

/// AP for every label present in both legends. Never clamped: negative values are kept
/// and listed in `negative`.
inline ApReport anatomy_preservation(const LabelVolume& seg_input, const LabelVolume& seg_pred,
                                     const ApOptions& opt = {}) {
  ApReport report;
  report.weighted = opt.weighted;
  if (!(seg_input.dims() == seg_pred.dims()))
    report.warnings.push_back("segmentation grids differ in dims; volumes compared physically");

  const auto vi = structure_volumes(seg_input);
  const auto vp = structure_volumes(seg_pred);
  std::map<std::uint32_t, const StructureVolume*> pred_by_label;
  for (const auto& s : vp) pred_by_label[s.label] = &s;

  double weight_total = 0, acc = 0;
  for (const auto& s : vi) {
    auto it = pred_by_label.find(s.label);
    if (it == pred_by_label.end()) continue;
    if (s.volume_mm3 <= 0)
      throw Error(Errc::ZeroInputVolume, "structure '" + s.name + "' has zero volume in the input segmentation");
    StructureAp e{s.label, s.name, s.volume_mm3, it->second->volume_mm3,
                  anatomy_preservation_value(s.volume_mm3, it->second->volume_mm3)};
    if (e.ap < 0) report.negative.push_back(e.name);
    const double w = opt.weighted ? s.volume_mm3 : 1.0;
    acc += w * e.ap;
    weight_total += w;
    report.per_structure.push_back(std::move(e));
  }
  if (report.per_structure.empty())
    throw Error(Errc::NoCommonStructures, "input and prediction segmentations share no labels");
  report.mean_ap = acc / weight_total;
  return report;
}

}  // namespace harmbench
