#pragma once

#include <string>
#include <string_view>

#include "torsoseg/volume.hpp"

namespace torsoseg {

// True for three letters drawing exactly one from each of {L,R}, {A,P}, {S,I}.
bool is_valid_orientation(std::string_view code);

// Permutes/flips voxel axes so the grid's orientation code equals `target`.
// World coordinates of every voxel are preserved.
template <typename T>
Volume<T> reorient(const Volume<T>& v, std::string_view target);

// Reverses the data along one voxel axis while keeping the affine, i.e. a
// physical mirror of the content.
template <typename T>
Volume<T> flip_axis(const Volume<T>& v, int axis);

}  // namespace torsoseg
