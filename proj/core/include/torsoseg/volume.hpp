#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "torsoseg/errors.hpp"

namespace torsoseg {

using Shape3 = std::array<std::int64_t, 3>;
using Index3 = std::array<std::int64_t, 3>;
using Vec3 = Eigen::Vector3d;
using Affine = Eigen::Matrix4d;

// Voxel lattice in world space: shape, plus an affine mapping voxel indices to
// world millimetres (RAS+ convention, as in NIfTI). Spacing is always the
// column norms of the affine's linear part.
class GridSpec {
 public:
  GridSpec();
  GridSpec(Shape3 shape, const Affine& affine);
  // Checks the supplied spacing against the affine columns (1e-6 relative).
  GridSpec(Shape3 shape, const Vec3& spacing, const Affine& affine);

  // Axis-aligned RAS grid with the given origin (world position of voxel 0).
  static GridSpec axis_aligned(Shape3 shape, const Vec3& spacing,
                               const Vec3& origin = Vec3::Zero());

  const Shape3& shape() const { return shape_; }
  const Vec3& spacing() const { return spacing_; }
  const Affine& affine() const { return affine_; }
  const Affine& inverse_affine() const { return inverse_; }

  std::int64_t voxel_count() const { return shape_[0] * shape_[1] * shape_[2]; }
  double voxel_volume() const { return spacing_.prod(); }

  // Unit direction of each voxel axis in world space (columns).
  Eigen::Matrix3d directions() const;

  Vec3 to_world(const Vec3& index) const;
  Vec3 to_index(const Vec3& world) const;

  // Three-letter axis code; letter j names the world direction voxel axis j
  // increases towards (R/L, A/P, S/I).
  std::string orientation() const;

  // Voxel axis most aligned with world x (left-right) / z (superior-inferior).
  int lateral_axis() const;
  int axial_axis() const;

  bool same_as(const GridSpec& other, double tol = 1e-5) const;

 private:
  Shape3 shape_;
  Vec3 spacing_;
  Affine affine_;
  Affine inverse_;
};

enum class VolumeKind { image, labelmap };

// Dense 3D grid with world geometry. x is the fastest varying axis.
// Floating-point element types are images; integer types are labelmaps.
template <typename T>
class Volume {
  static_assert(std::is_arithmetic_v<T>);

 public:
  using value_type = T;
  static constexpr VolumeKind kind =
      std::is_floating_point_v<T> ? VolumeKind::image : VolumeKind::labelmap;

  Volume() = default;
  explicit Volume(GridSpec grid, T fill = T{})
      : grid_(std::move(grid)),
        data_(static_cast<std::size_t>(grid_.voxel_count()), fill) {}
  Volume(GridSpec grid, std::vector<T> data)
      : grid_(std::move(grid)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != grid_.voxel_count())
      throw ValidationError("volume data size " + std::to_string(data_.size()) +
                            " does not match shape element count " +
                            std::to_string(grid_.voxel_count()));
  }

  const GridSpec& grid() const { return grid_; }
  const Shape3& shape() const { return grid_.shape(); }
  const Vec3& spacing() const { return grid_.spacing(); }
  const Affine& affine() const { return grid_.affine(); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  std::size_t linear(std::int64_t x, std::int64_t y, std::int64_t z) const {
    const auto& s = grid_.shape();
    return static_cast<std::size_t>(x + s[0] * (y + s[1] * z));
  }
  Index3 unravel(std::size_t i) const {
    const auto& s = grid_.shape();
    const auto li = static_cast<std::int64_t>(i);
    return {li % s[0], (li / s[0]) % s[1], li / (s[0] * s[1])};
  }
  bool contains(std::int64_t x, std::int64_t y, std::int64_t z) const {
    const auto& s = grid_.shape();
    return x >= 0 && y >= 0 && z >= 0 && x < s[0] && y < s[1] && z < s[2];
  }

  T& operator()(std::int64_t x, std::int64_t y, std::int64_t z) { return data_[linear(x, y, z)]; }
  const T& operator()(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data_[linear(x, y, z)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool operator==(const Volume& other) const {
    return grid_.same_as(other.grid_) && data_ == other.data_;
  }

 private:
  GridSpec grid_;
  std::vector<T> data_;
};

using Image = Volume<float>;
using LabelMap = Volume<std::int32_t>;
using Mask = Volume<std::uint8_t>;
using AnyVolume = std::variant<Image, LabelMap>;

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

// Binary mask of voxels equal to `label` (or nonzero when label < 0).
Mask binarize(const LabelMap& labels, std::int32_t label = -1);
LabelMap to_labels(const Mask& mask, std::int32_t label = 1);

template <typename T>
std::int64_t count_nonzero(const Volume<T>& v) {
  std::int64_t n = 0;
  for (const T x : v.data()) n += (x != T{}) ? 1 : 0;
  return n;
}

// Element-type conversion preserving geometry; values cast with static_cast.
template <typename To, typename From>
Volume<To> convert(const Volume<From>& v) {
  std::vector<To> out(v.data().begin(), v.data().end());
  return Volume<To>(v.grid(), std::move(out));
}

}  // namespace torsoseg
