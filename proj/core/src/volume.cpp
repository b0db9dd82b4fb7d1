#include "torsoseg/volume.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace torsoseg {

namespace {

void check_shape(const Shape3& shape) {
  for (const auto n : shape)
    if (n <= 0) throw ValidationError("volume shape must be positive on every axis");
}

Vec3 column_norms(const Affine& a) {
  return Vec3(a.block<3, 1>(0, 0).norm(), a.block<3, 1>(0, 1).norm(), a.block<3, 1>(0, 2).norm());
}

}  // namespace

GridSpec::GridSpec() : GridSpec({1, 1, 1}, Affine::Identity()) {}

GridSpec::GridSpec(Shape3 shape, const Affine& affine) : shape_(shape), affine_(affine) {
  check_shape(shape_);
  const Eigen::Matrix3d linear = affine_.block<3, 3>(0, 0);
  const double det = linear.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12)
    throw ValidationError("grid affine is not invertible");
  spacing_ = column_norms(affine_);
  inverse_ = affine_.inverse();
}

GridSpec::GridSpec(Shape3 shape, const Vec3& spacing, const Affine& affine)
    : GridSpec(shape, affine) {
  for (int i = 0; i < 3; ++i) {
    if (!(spacing[i] > 0)) throw ValidationError("spacing must be positive");
    if (std::abs(spacing_[i] - spacing[i]) > 1e-6 * spacing[i])
      throw ValidationError("affine column norms disagree with spacing");
  }
}

GridSpec GridSpec::axis_aligned(Shape3 shape, const Vec3& spacing, const Vec3& origin) {
  Affine a = Affine::Identity();
  for (int i = 0; i < 3; ++i) {
    if (!(spacing[i] > 0)) throw ValidationError("spacing must be positive");
    a(i, i) = spacing[i];
    a(i, 3) = origin[i];
  }
  return GridSpec(shape, a);
}

Eigen::Matrix3d GridSpec::directions() const {
  Eigen::Matrix3d d = affine_.block<3, 3>(0, 0);
  for (int j = 0; j < 3; ++j) d.col(j) /= spacing_[j];
  return d;
}

Vec3 GridSpec::to_world(const Vec3& index) const {
  return affine_.block<3, 3>(0, 0) * index + affine_.block<3, 1>(0, 3);
}

Vec3 GridSpec::to_index(const Vec3& world) const {
  return inverse_.block<3, 3>(0, 0) * world + inverse_.block<3, 1>(0, 3);
}

namespace {

// For each voxel axis, the world axis it is most aligned with, chosen greedily
// by largest absolute direction cosine so the result is a permutation.
std::array<int, 3> dominant_world_axes(const Eigen::Matrix3d& d) {
  std::array<int, 3> world_of{-1, -1, -1};
  std::array<bool, 3> used_world{false, false, false};
  for (int round = 0; round < 3; ++round) {
    double best = -1;
    int bi = 0, bj = 0;
    for (int j = 0; j < 3; ++j) {
      if (world_of[j] >= 0) continue;
      for (int i = 0; i < 3; ++i) {
        if (used_world[i]) continue;
        if (std::abs(d(i, j)) > best) {
          best = std::abs(d(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    world_of[bj] = bi;
    used_world[bi] = true;
  }
  return world_of;
}

}  // namespace

std::string GridSpec::orientation() const {
  static constexpr char positive[3] = {'R', 'A', 'S'};
  static constexpr char negative[3] = {'L', 'P', 'I'};
  const Eigen::Matrix3d d = directions();
  const auto world_of = dominant_world_axes(d);
  std::string code(3, '?');
  for (int j = 0; j < 3; ++j) {
    const int w = world_of[j];
    code[j] = d(w, j) >= 0 ? positive[w] : negative[w];
  }
  return code;
}

int GridSpec::lateral_axis() const {
  const auto world_of = dominant_world_axes(directions());
  for (int j = 0; j < 3; ++j)
    if (world_of[j] == 0) return j;
  return 0;
}

int GridSpec::axial_axis() const {
  const auto world_of = dominant_world_axes(directions());
  for (int j = 0; j < 3; ++j)
    if (world_of[j] == 2) return j;
  return 2;
}

bool GridSpec::same_as(const GridSpec& other, double tol) const {
  if (shape_ != other.shape_) return false;
  const double scale = std::max(1.0, affine_.cwiseAbs().maxCoeff());
  return (affine_ - other.affine_).cwiseAbs().maxCoeff() <= tol * scale;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!a.same_as(b)) {
    std::ostringstream os;
    os << "grid mismatch between " << what << ": shape (" << a.shape()[0] << "," << a.shape()[1]
       << "," << a.shape()[2] << ") vs (" << b.shape()[0] << "," << b.shape()[1] << ","
       << b.shape()[2] << ")";
    if (a.shape() == b.shape()) os << " with differing affines";
    throw ValidationError(os.str());
  }
}

Mask binarize(const LabelMap& labels, std::int32_t label) {
  Mask out(labels.grid());
  const auto in = labels.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < in.size(); ++i)
    dst[i] = label < 0 ? (in[i] != 0) : (in[i] == label);
  return out;
}

LabelMap to_labels(const Mask& mask, std::int32_t label) {
  LabelMap out(mask.grid());
  const auto in = mask.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = in[i] ? label : 0;
  return out;
}

}  // namespace torsoseg
