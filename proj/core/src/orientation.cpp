#include "torsoseg/orientation.hpp"

#include <array>
#include <cctype>

namespace torsoseg {

namespace {

// Returns world axis (0=x/LR, 1=y/AP, 2=z/SI) and sign (+1 toward R/A/S).
std::pair<int, int> decode_letter(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'R': return {0, +1};
    case 'L': return {0, -1};
    case 'A': return {1, +1};
    case 'P': return {1, -1};
    case 'S': return {2, +1};
    case 'I': return {2, -1};
    default: return {-1, 0};
  }
}

}  // namespace

bool is_valid_orientation(std::string_view code) {
  if (code.size() != 3) return false;
  std::array<bool, 3> seen{false, false, false};
  for (const char c : code) {
    const auto [axis, sign] = decode_letter(c);
    if (axis < 0 || seen[axis]) return false;
    seen[axis] = true;
  }
  return true;
}

template <typename T>
Volume<T> reorient(const Volume<T>& v, std::string_view target) {
  if (!is_valid_orientation(target))
    throw ValidationError("invalid orientation code '" + std::string(target) + "'");
  const std::string current = v.grid().orientation();

  // For each new axis t: source axis and whether it runs reversed.
  std::array<int, 3> source{};
  std::array<bool, 3> reversed{};
  for (int t = 0; t < 3; ++t) {
    const auto [want_axis, want_sign] = decode_letter(target[t]);
    for (int s = 0; s < 3; ++s) {
      const auto [have_axis, have_sign] = decode_letter(current[s]);
      if (have_axis == want_axis) {
        source[t] = s;
        reversed[t] = have_sign != want_sign;
      }
    }
  }

  const Shape3& old_shape = v.shape();
  const Shape3 new_shape{old_shape[source[0]], old_shape[source[1]], old_shape[source[2]]};
  const Affine& a = v.affine();
  Affine na = Affine::Identity();
  Vec3 origin_index = Vec3::Zero();
  for (int t = 0; t < 3; ++t) {
    const int s = source[t];
    na.block<3, 1>(0, t) = a.block<3, 1>(0, s) * (reversed[t] ? -1.0 : 1.0);
    if (reversed[t]) origin_index[s] = static_cast<double>(old_shape[s] - 1);
  }
  na.block<3, 1>(0, 3) = v.grid().to_world(origin_index);

  Volume<T> out(GridSpec(new_shape, na));
  // Old-index stride for a unit step along each new axis.
  std::array<std::int64_t, 3> old_stride{1, old_shape[0], old_shape[0] * old_shape[1]};
  std::array<std::int64_t, 3> step{};
  std::int64_t base = 0;
  for (int t = 0; t < 3; ++t) {
    const int s = source[t];
    step[t] = reversed[t] ? -old_stride[s] : old_stride[s];
    if (reversed[t]) base += (old_shape[s] - 1) * old_stride[s];
  }
  const auto src = v.data();
  auto dst = out.data();
  std::size_t o = 0;
  for (std::int64_t k = 0; k < new_shape[2]; ++k)
    for (std::int64_t j = 0; j < new_shape[1]; ++j) {
      std::int64_t idx = base + k * step[2] + j * step[1];
      for (std::int64_t i = 0; i < new_shape[0]; ++i, idx += step[0]) dst[o++] = src[static_cast<std::size_t>(idx)];
    }
  return out;
}

template <typename T>
Volume<T> flip_axis(const Volume<T>& v, int axis) {
  if (axis < 0 || axis > 2) throw ValidationError("axis must be 0, 1 or 2");
  Volume<T> out(v.grid());
  const auto& s = v.shape();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        Index3 src{x, y, z};
        src[axis] = s[axis] - 1 - src[axis];
        out(x, y, z) = v(src[0], src[1], src[2]);
      }
  return out;
}

template Image reorient(const Image&, std::string_view);
template LabelMap reorient(const LabelMap&, std::string_view);
template Mask reorient(const Mask&, std::string_view);
template Image flip_axis(const Image&, int);
template LabelMap flip_axis(const LabelMap&, int);
template Mask flip_axis(const Mask&, int);

}  // namespace torsoseg
