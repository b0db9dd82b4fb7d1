#include <cmath>
#include <random>

#include "sampling.hpp"
#include "torsoseg/parallel.hpp"
#include "torsoseg/resample.hpp"

namespace torsoseg {

double DisplacementField::max_magnitude() const {
  double best = 0.0;
  for (std::size_t i = 0; i < mm[0].size(); ++i) {
    const double m = std::sqrt(double(mm[0][i]) * mm[0][i] + double(mm[1][i]) * mm[1][i] +
                               double(mm[2][i]) * mm[2][i]);
    best = std::max(best, m);
  }
  return best;
}

DisplacementField elastic_field(const GridSpec& grid, const ElasticParams& params) {
  if (!(params.control_spacing_mm > 0)) throw ValidationError("control spacing must be positive");
  if (!(params.sigma_mm >= 0)) throw ValidationError("sigma must be non-negative");

  const auto& shape = grid.shape();
  std::array<std::int64_t, 3> nctrl{};
  for (int a = 0; a < 3; ++a) {
    const double extent = static_cast<double>(shape[a] - 1) * grid.spacing()[a];
    nctrl[a] = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(extent / params.control_spacing_mm)) + 1);
  }
  const std::size_t ncp = static_cast<std::size_t>(nctrl[0] * nctrl[1] * nctrl[2]);

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<std::vector<double>, 3> ctrl;
  for (auto& c : ctrl) {
    c.resize(ncp);
    for (auto& x : c) x = params.sigma_mm * normal(rng);
  }

  DisplacementField field{grid, {}};
  for (auto& f : field.mm) f.assign(static_cast<std::size_t>(grid.voxel_count()), 0.0f);
  if (params.sigma_mm == 0.0) return field;

  // Per-axis lookup: control cell and fraction for every voxel coordinate.
  std::array<std::vector<std::int64_t>, 3> cell;
  std::array<std::vector<double>, 3> frac;
  for (int a = 0; a < 3; ++a) {
    cell[a].resize(static_cast<std::size_t>(shape[a]));
    frac[a].resize(static_cast<std::size_t>(shape[a]));
    const double scale = shape[a] > 1 ? double(nctrl[a] - 1) / double(shape[a] - 1) : 0.0;
    for (std::int64_t i = 0; i < shape[a]; ++i) {
      const double c = double(i) * scale;
      auto c0 = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(c)), nctrl[a] - 2);
      cell[a][i] = c0;
      frac[a][i] = c - double(c0);
    }
  }
  auto cidx = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return static_cast<std::size_t>(x + nctrl[0] * (y + nctrl[1] * z));
  };

  parallel_for(0, shape[2], [&](std::int64_t z0, std::int64_t z1) {
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = 0; y < shape[1]; ++y)
        for (std::int64_t x = 0; x < shape[0]; ++x) {
          const auto cx = cell[0][x], cy = cell[1][y], cz = cell[2][z];
          const double fx = frac[0][x], fy = frac[1][y], fz = frac[2][z];
          const std::size_t o = static_cast<std::size_t>(x + shape[0] * (y + shape[1] * z));
          for (int a = 0; a < 3; ++a) {
            const auto& c = ctrl[a];
            double acc = 0.0;
            for (int dz = 0; dz < 2; ++dz)
              for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                  const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy) * (dz ? fz : 1 - fz);
                  acc += w * c[cidx(cx + dx, cy + dy, cz + dz)];
                }
            field.mm[a][o] = static_cast<float>(acc);
          }
        }
  });
  return field;
}

template <typename T>
Volume<T> warp(const Volume<T>& v, const DisplacementField& field, Interpolation mode) {
  if constexpr (Volume<T>::kind == VolumeKind::labelmap) {
    if (mode != Interpolation::nearest)
      throw ValidationError("labelmaps can only be warped with nearest interpolation");
  }
  require_same_grid(v.grid(), field.grid, "volume and displacement field");
  Volume<T> out(v.grid());
  const auto& s = v.shape();
  const Vec3 spacing = v.spacing();
  parallel_for(0, s[2], [&](std::int64_t z0, std::int64_t z1) {
    for (std::int64_t z = z0; z < z1; ++z)
      for (std::int64_t y = 0; y < s[1]; ++y)
        for (std::int64_t x = 0; x < s[0]; ++x) {
          const std::size_t o = v.linear(x, y, z);
          Vec3 p(double(x) + field.mm[0][o] / spacing[0], double(y) + field.mm[1][o] / spacing[1],
                 double(z) + field.mm[2][o] / spacing[2]);
          if (!detail::in_bounds(p, s)) continue;
          if (mode == Interpolation::nearest)
            out[o] = detail::sample_nearest(v, p);
          else
            out[o] = static_cast<T>(detail::sample_trilinear(v, p));
        }
  });
  return out;
}

template Image warp(const Image&, const DisplacementField&, Interpolation);
template LabelMap warp(const LabelMap&, const DisplacementField&, Interpolation);
template Mask warp(const Mask&, const DisplacementField&, Interpolation);

}  // namespace torsoseg
