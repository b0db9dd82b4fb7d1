#pragma once

#include <string>
#include <vector>

#include "torsoseg/schema.hpp"
#include "torsoseg/volume.hpp"

namespace torsoseg {

struct AssignedLevel {
  std::int32_t level_id = 0;
  std::string level;
  std::int32_t component_id = 0;
  double volume_mm3 = 0.0;
  Vec3 centroid_mm = Vec3::Zero();
  double si_extent_mm = 0.0;  // superior-inferior height including voxel thickness
};

enum class SpineAnomalyKind { merged_suspect, gap_suspect, count_overflow };
std::string_view to_string(SpineAnomalyKind k);

struct SpineAnomaly {
  SpineAnomalyKind kind;
  std::int32_t level_id = 0;  // level involved (upper level for gaps), 0 if unassigned
  Vec3 location_mm = Vec3::Zero();
  std::string detail;
};

struct SpineReport {
  std::vector<AssignedLevel> assigned;  // superior to inferior
  std::vector<SpineAnomaly> anomalies;
};

struct InstanceLabelParams {
  std::int32_t start_level = kFirstLevelId;  // C3
  double min_volume_mm3 = 500.0;
};

struct InstanceLabelResult {
  LabelMap instances;
  SpineReport report;
};

// Counts vertebral bodies from the top: 26-connected components of at least
// min_volume_mm3, ordered by centroid from superior to inferior, receive
// consecutive level ids starting at start_level. With an IVD mask, a component
// whose interior is crossed by the axial plane through an IVD component's
// centroid is split at that plane first. Components past L5 are left 0 and
// reported as count_overflow.
InstanceLabelResult instance_label(const Mask& vertebra_body, const Mask* ivd = nullptr,
                                   const InstanceLabelParams& params = {});

struct AnomalyParams {
  double extent_factor = 1.8;
  double spacing_factor = 1.8;
};

// Adds merged_suspect for levels taller than extent_factor x the median
// height, and gap_suspect where consecutive centroids are further apart than
// spacing_factor x the median distance. Heights are re-measured from `instances`.
SpineReport detect_anomalies(const LabelMap& instances, const SpineReport& report,
                             const AnomalyParams& params = {});

std::string spine_report_json(const SpineReport& report);

}  // namespace torsoseg
