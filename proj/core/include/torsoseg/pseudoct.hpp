#pragma once

#include <string>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

inline constexpr std::int32_t kBackgroundLabel = 1;
inline constexpr std::int32_t kLungLabel = 2;

struct BackgroundLungParams {
  double threshold_fraction = 0.1;  // of the 99th-percentile intensity
  double min_lung_volume_mm3 = 5000.0;
};

// Low-intensity voxels (below fraction x p99) split into 26-connected
// components: those touching the volume boundary are background (1), interior
// ones of at least min_lung_volume_mm3 are lung (2), the rest stay 0.
LabelMap find_background_and_lung(const Image& inphase, const BackgroundLungParams& params = {});

inline constexpr float kMuscleScale = 0.8f;
inline constexpr float kBackgroundLungOffset = 600.0f;

struct PseudoCtResult {
  Image image;
  std::vector<std::string> warnings;
};

// out = water * (0.8 inside muscle) - (600 inside background/lung). Masks are
// nonzero-is-inside. No clamping; a warning is raised when more than 1% of
// the non-background voxels fall below -600.
PseudoCtResult make_pseudo_ct(const Image& water, const LabelMap& muscle, const LabelMap& background_lung);

}  // namespace torsoseg
