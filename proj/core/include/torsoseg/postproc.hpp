#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "torsoseg/components.hpp"
#include "torsoseg/schema.hpp"

namespace torsoseg {

// Per class: zero components smaller than the class's min_component_volume;
// for single-component classes keep only the first (largest) component.
// Labels absent from the schema pass through untouched.
LabelMap filter_small_components(const LabelMap& labels, const LabelSchema& schema,
                                 Connectivity connectivity = Connectivity::corners);

// As above, also returning the statistics of every component before filtering
// and whether it survived.
struct FilterOutcome {
  LabelMap labels;
  std::vector<ComponentStats> components;
  std::vector<bool> kept;
};
FilterOutcome filter_small_components_detailed(const LabelMap& labels, const LabelSchema& schema,
                                               Connectivity connectivity = Connectivity::corners);

struct ClassMask {
  std::int32_t class_id;
  const Mask* mask;
};

// Each voxel receives the claimant class with the best (lowest) merge
// priority; equal priorities fall back to the lower class id. Classes missing
// from the schema rank after every catalogued class.
LabelMap merge_with_priority(std::span<const ClassMask> masks, const LabelSchema& schema);

// Merges whole labelmaps (e.g. outputs of different source models) voxel by
// voxel with the same rule, without materialising per-class masks.
LabelMap merge_labelmaps(std::span<const LabelMap> sources, const LabelSchema& schema);

}  // namespace torsoseg
