#pragma once

#include "torsoseg/volume.hpp"

namespace torsoseg {

struct IsoGridParams {
  double spacing_mm = 4.0;
  std::int64_t size = 96;  // voxels per axis (384 mm at 4 mm)
};

// Resamples onto a size^3 isotropic grid (keeping the input's axis
// directions) centred on the centroid of the nonzero voxels. Images use
// trilinear, labelmaps nearest interpolation.
template <typename T>
Volume<T> to_iso4(const Volume<T>& v, const IsoGridParams& params = {});

// Threshold at fraction x p99, keep the largest 26-connected component and
// fill holes enclosed within each axial slice.
Mask body_mask(const Image& inphase_iso, double threshold_fraction = 0.1);

inline constexpr int kDefaultBands = 6;

// Splits the body's superior-inferior extent into `bands` equal-height axial
// bands. The top band is label 1; band b >= 1 is split at the mid-sagittal
// plane through the body centroid into label 2b (subject's left) and 2b + 1
// (subject's right). The default of six bands gives eleven regions.
LabelMap compute_quadrants(const Mask& body, int bands = kDefaultBands);

// Partner of a quadrant label under a left/right mirror (1 maps to itself).
std::int32_t mirrored_quadrant(std::int32_t label);

}  // namespace torsoseg
