#pragma once

#include <cstdint>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg::detail {

// Exact squared Euclidean distance (mm²) from every voxel of a box of shape
// `shape` to the nearest seed voxel, with per-axis spacing. Infinity when the
// box holds no seed. x is the fastest axis.
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& seeds,
                                               const Shape3& shape, const Vec3& spacing);

}  // namespace torsoseg::detail
