#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

enum class Interpolation { nearest, trilinear };

// Samples `v` at the world position of every voxel of `target`. Positions more
// than half a voxel outside the source lattice read 0; inside that margin the
// lattice is edge-clamped. Labelmaps accept only nearest interpolation.
// When `coverage` is given it receives 1 for every in-bounds target voxel.
template <typename T>
Volume<T> resample(const Volume<T>& v, const GridSpec& target, Interpolation mode,
                   Mask* coverage = nullptr);

// Grid covering the same physical extent with new spacing: outer voxel faces
// stay aligned, voxel count per axis is extent / spacing rounded to nearest.
GridSpec respaced_grid(const GridSpec& grid, const Vec3& spacing);

struct ElasticParams {
  double control_spacing_mm = 32.0;
  double sigma_mm = 4.0;
  std::uint64_t seed = 0;
};

// Dense displacement in millimetres along each voxel axis.
struct DisplacementField {
  GridSpec grid;
  std::array<std::vector<float>, 3> mm;

  double max_magnitude() const;
};

// Gaussian displacements drawn on a coarse control lattice spanning the grid
// (corner control points coincide with corner voxels), trilinearly upsampled.
DisplacementField elastic_field(const GridSpec& grid, const ElasticParams& params);

// Backward warp: out(x) = in(x + d(x)).
template <typename T>
Volume<T> warp(const Volume<T>& v, const DisplacementField& field, Interpolation mode);

template <typename T>
Volume<T> elastic_deform(const Volume<T>& v, const ElasticParams& params, Interpolation mode) {
  return warp(v, elastic_field(v.grid(), params), mode);
}

}  // namespace torsoseg
