#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

template <typename T>
struct StitchResult {
  Volume<T> volume;
  std::vector<std::string> warnings;
};

// Fuses overlapping stacks (sharing axis directions) into one volume spanning
// their joint bounding box at `reference_spacing` (default: finest spacing per
// axis). Along the superior-inferior axis each stack's weight ramps linearly
// from 0 at its edge slice to 1 at the far end of the overlap it shares with a
// neighbour; weights are normalised per voxel. Images are resampled
// trilinearly and blended; labelmaps are resampled nearest and take the value
// of the highest-weight stack.
template <typename T>
StitchResult<T> stitch(std::span<const Volume<T>> stacks,
                       std::optional<Vec3> reference_spacing = std::nullopt);

// Stitches files of one element kind; mixing images and labelmaps is an error.
StitchResult<float> stitch_images(std::span<const Image> stacks, std::optional<Vec3> spacing = std::nullopt);
StitchResult<std::int32_t> stitch_labels(std::span<const LabelMap> stacks,
                                         std::optional<Vec3> spacing = std::nullopt);

}  // namespace torsoseg
