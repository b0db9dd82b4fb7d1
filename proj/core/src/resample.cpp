#include "torsoseg/resample.hpp"

#include <cmath>

#include "sampling.hpp"
#include "torsoseg/parallel.hpp"

namespace torsoseg {

template <typename T>
Volume<T> resample(const Volume<T>& v, const GridSpec& target, Interpolation mode, Mask* coverage) {
  if constexpr (Volume<T>::kind == VolumeKind::labelmap) {
    if (mode != Interpolation::nearest)
      throw ValidationError("labelmaps can only be resampled with nearest interpolation");
  }
  Volume<T> out(target);
  if (coverage) *coverage = Mask(target);
  // target index -> source index
  const Affine m = v.grid().inverse_affine() * target.affine();
  const Eigen::Matrix3d lin = m.block<3, 3>(0, 0);
  const Vec3 off = m.block<3, 1>(0, 3);
  const auto& ts = target.shape();
  const auto& ss = v.shape();

  parallel_for(0, ts[2], [&](std::int64_t z0, std::int64_t z1) {
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = 0; y < ts[1]; ++y)
        for (std::int64_t x = 0; x < ts[0]; ++x) {
          Vec3 p = lin * Vec3(static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)) + off;
          for (int a = 0; a < 3; ++a) p[a] = detail::snap(p[a]);
          if (!detail::in_bounds(p, ss)) continue;
          const std::size_t o = out.linear(x, y, z);
          if (coverage) (*coverage)[o] = 1;
          if (mode == Interpolation::nearest)
            out[o] = detail::sample_nearest(v, p);
          else
            out[o] = static_cast<T>(detail::sample_trilinear(v, p));
        }
  });
  return out;
}

GridSpec respaced_grid(const GridSpec& grid, const Vec3& spacing) {
  Shape3 shape{};
  Affine a = grid.affine();
  const Eigen::Matrix3d d = grid.directions();
  for (int j = 0; j < 3; ++j) {
    if (!(spacing[j] > 0)) throw ValidationError("spacing must be positive");
    const double extent = static_cast<double>(grid.shape()[j]) * grid.spacing()[j];
    shape[j] = std::max<std::int64_t>(1, std::llround(extent / spacing[j]));
    a.block<3, 1>(0, j) = d.col(j) * spacing[j];
  }
  // Keep the outer voxel faces aligned: shift the first centre by half the
  // spacing change.
  Vec3 shift = Vec3::Zero();
  for (int j = 0; j < 3; ++j) shift += d.col(j) * 0.5 * (spacing[j] - grid.spacing()[j]);
  a.block<3, 1>(0, 3) += shift;
  return GridSpec(shape, a);
}

template Image resample(const Image&, const GridSpec&, Interpolation, Mask*);
template LabelMap resample(const LabelMap&, const GridSpec&, Interpolation, Mask*);
template Mask resample(const Mask&, const GridSpec&, Interpolation, Mask*);

}  // namespace torsoseg
