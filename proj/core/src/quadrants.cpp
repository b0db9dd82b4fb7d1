#include "torsoseg/quadrants.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "torsoseg/components.hpp"
#include "torsoseg/resample.hpp"
#include "torsoseg/stats.hpp"

namespace torsoseg {

template <typename T>
Volume<T> to_iso4(const Volume<T>& v, const IsoGridParams& params) {
  Vec3 sum = Vec3::Zero();
  std::int64_t n = 0;
  const auto& s = v.shape();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x)
        if (v(x, y, z) != T{}) {
          sum += Vec3(double(x), double(y), double(z));
          ++n;
        }
  if (n == 0) throw ValidationError("cannot centre an empty volume");
  const Vec3 centre = v.grid().to_world(sum / double(n));

  const Eigen::Matrix3d dir = v.grid().directions();
  Affine a = Affine::Identity();
  for (int j = 0; j < 3; ++j) a.block<3, 1>(0, j) = dir.col(j) * params.spacing_mm;
  const double half = 0.5 * double(params.size - 1);
  a.block<3, 1>(0, 3) = centre - a.block<3, 3>(0, 0) * Vec3::Constant(half);
  const GridSpec target({params.size, params.size, params.size}, a);
  constexpr Interpolation mode =
      Volume<T>::kind == VolumeKind::image ? Interpolation::trilinear : Interpolation::nearest;
  return resample(v, target, mode);
}

template Image to_iso4(const Image&, const IsoGridParams&);
template LabelMap to_iso4(const LabelMap&, const IsoGridParams&);
template Mask to_iso4(const Mask&, const IsoGridParams&);

namespace {

// Fills background regions of each axial slice that do not reach the slice border.
void fill_slice_holes(Mask& m, int axial) {
  const auto& s = m.shape();
  const int u = axial == 0 ? 1 : 0;
  const int w = axial == 2 ? 1 : 2;
  const auto nu = s[u], nw = s[w];
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(nu * nw));
  std::deque<std::pair<std::int64_t, std::int64_t>> queue;
  for (std::int64_t k = 0; k < s[axial]; ++k) {
    auto at = [&](std::int64_t a, std::int64_t b) -> std::uint8_t& {
      Index3 idx{};
      idx[axial] = k;
      idx[u] = a;
      idx[w] = b;
      return m(idx[0], idx[1], idx[2]);
    };
    std::fill(outside.begin(), outside.end(), 0);
    auto seed = [&](std::int64_t a, std::int64_t b) {
      auto& o = outside[static_cast<std::size_t>(a + nu * b)];
      if (!o && !at(a, b)) {
        o = 1;
        queue.emplace_back(a, b);
      }
    };
    for (std::int64_t a = 0; a < nu; ++a) {
      seed(a, 0);
      seed(a, nw - 1);
    }
    for (std::int64_t b = 0; b < nw; ++b) {
      seed(0, b);
      seed(nu - 1, b);
    }
    while (!queue.empty()) {
      const auto [a, b] = queue.front();
      queue.pop_front();
      if (a > 0) seed(a - 1, b);
      if (a + 1 < nu) seed(a + 1, b);
      if (b > 0) seed(a, b - 1);
      if (b + 1 < nw) seed(a, b + 1);
    }
    for (std::int64_t b = 0; b < nw; ++b)
      for (std::int64_t a = 0; a < nu; ++a)
        if (!outside[static_cast<std::size_t>(a + nu * b)]) at(a, b) = 1;
  }
}

}  // namespace

Mask body_mask(const Image& inphase_iso, double threshold_fraction) {
  if (inphase_iso.empty()) throw ValidationError("image is empty");
  const double threshold = threshold_fraction * percentile(inphase_iso.data(), 99.0);
  Mask raw(inphase_iso.grid());
  for (std::size_t i = 0; i < raw.values().size(); ++i) raw[i] = inphase_iso[i] > threshold;
  const auto cc = connected_components(raw, Connectivity::corners);
  if (cc.stats.empty()) throw ValidationError("body mask is empty after thresholding");
  Mask out(inphase_iso.grid());
  const auto comp = cc.components.data();
  for (std::size_t i = 0; i < comp.size(); ++i) out[i] = comp[i] == 1;
  fill_slice_holes(out, inphase_iso.grid().axial_axis());
  return out;
}

LabelMap compute_quadrants(const Mask& body, int bands) {
  if (bands < 2) throw ValidationError("quadrant geometry needs at least two bands");
  const auto& grid = body.grid();
  const auto& s = body.shape();
  // Superior extent along world z, and body centroid.
  double top = -std::numeric_limits<double>::infinity();
  double bottom = std::numeric_limits<double>::infinity();
  Vec3 sum = Vec3::Zero();
  std::int64_t n = 0;
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x)
        if (body(x, y, z)) {
          const Vec3 idx{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
          const double wz = grid.to_world(idx)[2];
          top = std::max(top, wz);
          bottom = std::min(bottom, wz);
          sum += idx;
          ++n;
        }
  if (n == 0) throw ValidationError("body mask is empty");
  const double slice = grid.spacing()[grid.axial_axis()];
  // Extents cover whole voxels: half a slice beyond the outermost centres.
  top += 0.5 * slice;
  bottom -= 0.5 * slice;
  const double band_height = (top - bottom) / bands;
  const double mid_x = grid.to_world(sum / double(n))[0];

  LabelMap out(grid);
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        if (!body(x, y, z)) continue;
        const Vec3 w = grid.to_world(Vec3(double(x), double(y), double(z)));
        const int band = std::clamp(static_cast<int>(std::floor((top - w[2]) / band_height)), 0, bands - 1);
        std::int32_t label = 1;
        if (band > 0) label = 2 * band + (w[0] - mid_x < 0 ? 0 : 1);
        out(x, y, z) = label;
      }
  return out;
}

std::int32_t mirrored_quadrant(std::int32_t label) {
  if (label <= 1) return label;
  return label % 2 == 0 ? label + 1 : label - 1;
}

}  // namespace torsoseg
