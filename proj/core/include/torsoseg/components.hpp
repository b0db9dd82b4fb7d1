#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

enum class Connectivity : int { faces = 6, edges = 18, corners = 26 };

Connectivity parse_connectivity(int n);

struct ComponentStats {
  std::int32_t component_id = 0;
  std::int32_t class_id = 0;
  std::int64_t voxel_count = 0;
  double volume_mm3 = 0.0;
  Vec3 centroid_mm = Vec3::Zero();
  // Inclusive voxel index bounds: xmin, ymin, zmin, xmax, ymax, zmax.
  std::array<std::int64_t, 6> bbox{};
  // Linear index of the component's first voxel in raster order.
  std::int64_t first_voxel = 0;
};

struct ComponentLabeling {
  LabelMap components;
  std::vector<ComponentStats> stats;  // stats[k] describes component k+1
};

// Labels the connected components of a binary mask (nonzero = foreground).
// Ids 1..K are assigned by descending voxel count, ties broken by the smaller
// linear index of the component's first voxel.
ComponentLabeling connected_components(const Mask& mask, Connectivity connectivity);

// Same-value connectivity over a labelmap: voxels join only when they carry the
// same nonzero label. Components are ordered by class id, then as above.
ComponentLabeling label_components(const LabelMap& labels, Connectivity connectivity);

}  // namespace torsoseg
