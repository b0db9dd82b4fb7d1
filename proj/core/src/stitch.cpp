#include "torsoseg/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "torsoseg/parallel.hpp"
#include "torsoseg/resample.hpp"

namespace torsoseg {

namespace {

struct StackPlacement {
  double lo = 0;  // first / last voxel centre along the SI output axis, in output slices
  double hi = 0;
  double ramp_up_end = 0;     // weight reaches 1 here (== lo when no lower overlap)
  double ramp_down_start = 0;  // weight leaves 1 here (== hi when no upper overlap)
  std::int64_t slab_begin = 0;
  std::int64_t slab_end = 0;  // exclusive
};

double ramp_weight(const StackPlacement& p, double s) {
  double w = 1.0;
  if (p.ramp_up_end > p.lo) w = std::min(w, (s - p.lo) / (p.ramp_up_end - p.lo));
  if (p.ramp_down_start < p.hi) w = std::min(w, (p.hi - s) / (p.hi - p.ramp_down_start));
  return std::clamp(w, 0.0, 1.0);
}

}  // namespace

template <typename T>
StitchResult<T> stitch(std::span<const Volume<T>> stacks, std::optional<Vec3> reference_spacing) {
  if (stacks.empty()) throw ValidationError("stitch needs at least one stack");
  const Eigen::Matrix3d dir = stacks.front().grid().directions();
  for (const auto& s : stacks)
    if ((s.grid().directions() - dir).cwiseAbs().maxCoeff() > 1e-4)
      throw ValidationError("stacks must share axis directions");

  Vec3 spacing = stacks.front().spacing();
  for (const auto& s : stacks) spacing = spacing.cwiseMin(s.spacing());
  if (reference_spacing) spacing = *reference_spacing;
  for (int a = 0; a < 3; ++a)
    if (!(spacing[a] > 0)) throw ValidationError("reference spacing must be positive");

  // Bounding box of voxel centres in the shared direction frame.
  const Eigen::Matrix3d to_frame = dir.inverse();
  Vec3 umin = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 umax = -umin;
  std::vector<std::pair<Vec3, Vec3>> boxes;
  for (const auto& s : stacks) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (int c = 0; c < 8; ++c) {
      Vec3 idx;
      for (int a = 0; a < 3; ++a) idx[a] = (c >> a) & 1 ? double(s.shape()[a] - 1) : 0.0;
      const Vec3 u = to_frame * s.grid().to_world(idx);
      lo = lo.cwiseMin(u);
      hi = hi.cwiseMax(u);
    }
    boxes.emplace_back(lo, hi);
    umin = umin.cwiseMin(lo);
    umax = umax.cwiseMax(hi);
  }
  Shape3 shape{};
  for (int a = 0; a < 3; ++a) shape[a] = std::llround((umax[a] - umin[a]) / spacing[a]) + 1;
  Affine affine = Affine::Identity();
  for (int a = 0; a < 3; ++a) affine.block<3, 1>(0, a) = dir.col(a) * spacing[a];
  affine.block<3, 1>(0, 3) = dir * umin;
  const GridSpec out_grid(shape, affine);
  const int si = out_grid.axial_axis();

  const std::size_t n = stacks.size();
  std::vector<StackPlacement> place(n);
  for (std::size_t k = 0; k < n; ++k) {
    place[k].lo = (boxes[k].first[si] - umin[si]) / spacing[si];
    place[k].hi = (boxes[k].second[si] - umin[si]) / spacing[si];
  }

  // Coverage along SI must not leave a gap of more than one slice.
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(place[a].lo, place[a].hi) < std::tie(place[b].lo, place[b].hi);
  });
  double covered_to = place[order[0]].hi;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& p = place[order[i]];
    const double missing = p.lo - covered_to - 1.0;
    if (missing > 1.0 + 1e-6) {
      std::ostringstream os;
      os << "stacks are disjoint along the superior-inferior axis (gap of " << missing << " slices)";
      throw ValidationError(os.str());
    }
    covered_to = std::max(covered_to, p.hi);
  }

  for (std::size_t k = 0; k < n; ++k) {
    auto& p = place[k];
    p.ramp_up_end = p.lo;
    p.ramp_down_start = p.hi;
    double below_reach = -std::numeric_limits<double>::infinity();
    double above_start = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const auto& q = place[j];
      if (q.lo < p.lo && q.hi >= p.lo) below_reach = std::max(below_reach, q.hi);
      if (q.hi > p.hi && q.lo <= p.hi) above_start = std::min(above_start, q.lo);
    }
    if (std::isfinite(below_reach)) p.ramp_up_end = std::min(p.hi, below_reach);
    if (std::isfinite(above_start)) p.ramp_down_start = std::max(p.lo, above_start);
    p.slab_begin = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(p.lo - 0.5)), 0, shape[si]);
    p.slab_end = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(p.hi + 0.5)) + 1, 0, shape[si]);
  }

  constexpr Interpolation mode =
      Volume<T>::kind == VolumeKind::image ? Interpolation::trilinear : Interpolation::nearest;
  std::vector<Volume<T>> slabs;
  std::vector<Mask> coverage;
  slabs.reserve(n);
  coverage.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Shape3 slab_shape = shape;
    slab_shape[si] = std::max<std::int64_t>(1, place[k].slab_end - place[k].slab_begin);
    Affine slab_affine = affine;
    slab_affine.block<3, 1>(0, 3) += affine.block<3, 1>(0, si) * double(place[k].slab_begin);
    Mask cov;
    slabs.push_back(resample(stacks[k], GridSpec(slab_shape, slab_affine), mode, &cov));
    coverage.push_back(std::move(cov));
  }

  Volume<T> out(out_grid);
  const std::int64_t plane = shape[0] * shape[1] * shape[2] / shape[si];
  auto slab_index = [&](std::size_t k, const Index3& idx) {
    Index3 local = idx;
    local[si] -= place[k].slab_begin;
    return slabs[k].linear(local[0], local[1], local[2]);
  };
  parallel_for(0, shape[si], [&](std::int64_t s0, std::int64_t s1) {
    std::vector<std::size_t> active;
    for (std::int64_t s = s0; s < s1; ++s) {
      active.clear();
      for (std::size_t k = 0; k < n; ++k)
        if (s >= place[k].slab_begin && s < place[k].slab_end) active.push_back(k);
      if (active.empty()) continue;
      std::vector<double> w(active.size());
      for (std::size_t a = 0; a < active.size(); ++a) w[a] = ramp_weight(place[active[a]], double(s));
      for (std::int64_t p = 0; p < plane; ++p) {
        Index3 idx{};
        std::int64_t rest = p;
        for (int a = 0; a < 3; ++a) {
          if (a == si) {
            idx[a] = s;
            continue;
          }
          idx[a] = rest % shape[a];
          rest /= shape[a];
        }
        const std::size_t o = out.linear(idx[0], idx[1], idx[2]);
        if constexpr (Volume<T>::kind == VolumeKind::image) {
          double num = 0.0, den = 0.0, plain = 0.0;
          int hits = 0;
          for (std::size_t a = 0; a < active.size(); ++a) {
            const auto k = active[a];
            const auto li = slab_index(k, idx);
            if (!coverage[k][li]) continue;
            const double v = static_cast<double>(slabs[k][li]);
            num += w[a] * v;
            den += w[a];
            plain += v;
            ++hits;
          }
          if (hits == 0) continue;
          out[o] = static_cast<T>(den > 0 ? num / den : plain / hits);
        } else {
          double best_w = -1.0;
          double best_lo = 0.0;
          T best_v{};
          for (std::size_t a = 0; a < active.size(); ++a) {
            const auto k = active[a];
            const auto li = slab_index(k, idx);
            if (!coverage[k][li]) continue;
            const T v = slabs[k][li];
            const bool better = w[a] > best_w ||
                                (w[a] == best_w && (place[k].lo < best_lo || (place[k].lo == best_lo && v < best_v)));
            if (better) {
              best_w = w[a];
              best_lo = place[k].lo;
              best_v = v;
            }
          }
          if (best_w >= 0) out[o] = best_v;
        }
      }
    }
  });

  StitchResult<T> result{std::move(out), {}};
  if constexpr (Volume<T>::kind == VolumeKind::image) {
    // Overlap intensity consistency check for each pair of stacks.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto b = std::max(place[i].slab_begin, place[j].slab_begin);
        const auto e = std::min(place[i].slab_end, place[j].slab_end);
        if (b >= e) continue;
        double si_sum = 0, sj_sum = 0;
        std::int64_t cnt = 0;
        for (std::int64_t s = b; s < e; ++s)
          for (std::int64_t p = 0; p < plane; ++p) {
            Index3 idx{};
            std::int64_t rest = p;
            for (int a = 0; a < 3; ++a) {
              if (a == si) {
                idx[a] = s;
                continue;
              }
              idx[a] = rest % shape[a];
              rest /= shape[a];
            }
            const auto li = slab_index(i, idx), lj = slab_index(j, idx);
            if (!coverage[i][li] || !coverage[j][lj]) continue;
            si_sum += slabs[i][li];
            sj_sum += slabs[j][lj];
            ++cnt;
          }
        if (cnt == 0) continue;
        const double mi = si_sum / double(cnt), mj = sj_sum / double(cnt);
        const double scale = std::max(std::abs(mi), std::abs(mj));
        if (scale > 0 && std::abs(mi - mj) > 0.2 * scale) {
          std::ostringstream os;
          os << "overlap of stacks " << i << " and " << j << " differs in mean intensity by "
             << 100.0 * std::abs(mi - mj) / scale << "% (" << mi << " vs " << mj << ")";
          result.warnings.push_back(os.str());
        }
      }
  }
  return result;
}

StitchResult<float> stitch_images(std::span<const Image> stacks, std::optional<Vec3> spacing) {
  return stitch<float>(stacks, spacing);
}

StitchResult<std::int32_t> stitch_labels(std::span<const LabelMap> stacks, std::optional<Vec3> spacing) {
  return stitch<std::int32_t>(stacks, spacing);
}

template StitchResult<float> stitch(std::span<const Image>, std::optional<Vec3>);
template StitchResult<std::int32_t> stitch(std::span<const LabelMap>, std::optional<Vec3>);

}  // namespace torsoseg
