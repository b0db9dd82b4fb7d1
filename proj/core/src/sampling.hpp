#pragma once

#include <algorithm>
#include <cmath>

#include "torsoseg/volume.hpp"

namespace torsoseg::detail {

// Positions within this distance of a lattice point are snapped onto it so
// affine round-off cannot turn an exact grid match into an interpolation.
inline constexpr double kSnap = 1e-6;

inline double snap(double p) {
  const double r = std::nearbyint(p);
  return std::abs(p - r) < kSnap ? r : p;
}

inline bool in_bounds(const Vec3& p, const Shape3& s) {
  for (int a = 0; a < 3; ++a)
    if (p[a] < -0.5 - kSnap || p[a] > static_cast<double>(s[a]) - 0.5 + kSnap) return false;
  return true;
}

inline std::int64_t clamp_index(std::int64_t i, std::int64_t n) {
  return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

template <typename T>
T sample_nearest(const Volume<T>& v, const Vec3& p) {
  const auto& s = v.shape();
  const auto x = clamp_index(static_cast<std::int64_t>(std::floor(p[0] + 0.5)), s[0]);
  const auto y = clamp_index(static_cast<std::int64_t>(std::floor(p[1] + 0.5)), s[1]);
  const auto z = clamp_index(static_cast<std::int64_t>(std::floor(p[2] + 0.5)), s[2]);
  return v(x, y, z);
}

template <typename T>
double sample_trilinear(const Volume<T>& v, const Vec3& p) {
  const auto& s = v.shape();
  std::int64_t i0[3], i1[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const double c = std::clamp(p[a], 0.0, static_cast<double>(s[a] - 1));
    const double fl = std::floor(c);
    i0[a] = static_cast<std::int64_t>(fl);
    i1[a] = std::min<std::int64_t>(i0[a] + 1, s[a] - 1);
    f[a] = c - fl;
  }
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? f[2] : 1.0 - f[2];
    if (wz == 0.0) continue;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? f[1] : 1.0 - f[1];
      if (wy == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? f[0] : 1.0 - f[0];
        if (wx == 0.0) continue;
        acc += wx * wy * wz *
               static_cast<double>(v(dx ? i1[0] : i0[0], dy ? i1[1] : i0[1], dz ? i1[2] : i0[2]));
      }
    }
  }
  return acc;
}

}  // namespace torsoseg::detail
