#include "torsoseg/components.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace torsoseg {

Connectivity parse_connectivity(int n) {
  switch (n) {
    case 6: return Connectivity::faces;
    case 18: return Connectivity::edges;
    case 26: return Connectivity::corners;
    default: throw ValidationError("connectivity must be 6, 18 or 26, got " + std::to_string(n));
  }
}

namespace {

struct Offset {
  int dx, dy, dz;
};

// Neighbours already visited in a raster scan (z, then y, then x ascending).
std::vector<Offset> backward_neighbours(Connectivity c) {
  std::vector<Offset> out;
  for (int dz = -1; dz <= 0; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dz == 0 && (dy > 0 || (dy == 0 && dx >= 0))) continue;
        const int order = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (c == Connectivity::faces && order > 1) continue;
        if (c == Connectivity::edges && order > 2) continue;
        out.push_back({dx, dy, dz});
      }
  return out;
}

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t root(std::uint32_t n) {
    while (parent_[n] != n) {
      parent_[n] = parent_[parent_[n]];
      n = parent_[n];
    }
    return n;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = root(a);
    b = root(b);
    if (a == b) return;
    if (a < b)
      parent_[b] = a;
    else
      parent_[a] = b;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

template <typename T>
ComponentLabeling label_impl(const Volume<T>& in, Connectivity connectivity, bool binary) {
  const auto& s = in.shape();
  const auto sx = s[0], sy = s[1], sz = s[2];
  const auto neighbours = backward_neighbours(connectivity);
  std::vector<std::int64_t> delta;
  for (const auto& o : neighbours) delta.push_back(o.dx + sx * (o.dy + sy * o.dz));

  const auto src = in.data();
  LabelMap out(in.grid());
  auto provisional = out.data();  // provisional label + 1, 0 = background
  DisjointSet sets;
  sets.make();  // slot 0 unused

  auto same = [&](T a, T b) { return binary ? (b != T{}) : (a == b); };

  std::uint32_t roots_seen[13];
  for (std::int64_t z = 0; z < sz; ++z)
    for (std::int64_t y = 0; y < sy; ++y)
      for (std::int64_t x = 0; x < sx; ++x) {
        const std::size_t i = static_cast<std::size_t>(x + sx * (y + sy * z));
        const T v = src[i];
        if (v == T{}) continue;
        int found = 0;
        for (std::size_t k = 0; k < neighbours.size(); ++k) {
          const auto& o = neighbours[k];
          const auto nx = x + o.dx, ny = y + o.dy, nz = z + o.dz;
          if (nx < 0 || ny < 0 || nz < 0 || nx >= sx || ny >= sy) continue;
          const std::size_t j = static_cast<std::size_t>(static_cast<std::int64_t>(i) + delta[k]);
          if (!same(v, src[j])) continue;
          roots_seen[found++] = static_cast<std::uint32_t>(provisional[j]);
        }
        if (found == 0) {
          provisional[i] = static_cast<std::int32_t>(sets.make());
        } else {
          provisional[i] = static_cast<std::int32_t>(roots_seen[0]);
          for (int k = 1; k < found; ++k)
            if (roots_seen[k] != roots_seen[0]) sets.unite(roots_seen[0], roots_seen[k]);
        }
      }

  // Resolve roots and gather per-root statistics.
  const std::size_t nprov = sets.size();
  std::vector<std::uint32_t> root_of(nprov);
  for (std::uint32_t p = 1; p < nprov; ++p) root_of[p] = sets.root(p);
  std::vector<std::int32_t> slot(nprov, -1);
  std::vector<ComponentStats> stats;
  std::vector<Vec3> sums;
  for (std::int64_t z = 0; z < sz; ++z)
    for (std::int64_t y = 0; y < sy; ++y)
      for (std::int64_t x = 0; x < sx; ++x) {
        const std::size_t i = static_cast<std::size_t>(x + sx * (y + sy * z));
        const auto p = provisional[i];
        if (p == 0) continue;
        const auto r = root_of[static_cast<std::size_t>(p)];
        auto& sl = slot[r];
        if (sl < 0) {
          sl = static_cast<std::int32_t>(stats.size());
          ComponentStats c;
          c.class_id = binary ? 1 : static_cast<std::int32_t>(src[i]);
          c.bbox = {x, y, z, x, y, z};
          c.first_voxel = static_cast<std::int64_t>(i);
          stats.push_back(c);
          sums.push_back(Vec3::Zero());
        }
        auto& c = stats[static_cast<std::size_t>(sl)];
        ++c.voxel_count;
        sums[static_cast<std::size_t>(sl)] += Vec3(double(x), double(y), double(z));
        c.bbox[0] = std::min(c.bbox[0], x);
        c.bbox[1] = std::min(c.bbox[1], y);
        c.bbox[2] = std::min(c.bbox[2], z);
        c.bbox[3] = std::max(c.bbox[3], x);
        c.bbox[4] = std::max(c.bbox[4], y);
        c.bbox[5] = std::max(c.bbox[5], z);
        provisional[i] = sl + 1;
      }

  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = stats[a];
    const auto& cb = stats[b];
    if (ca.class_id != cb.class_id) return ca.class_id < cb.class_id;
    if (ca.voxel_count != cb.voxel_count) return ca.voxel_count > cb.voxel_count;
    return ca.first_voxel < cb.first_voxel;
  });
  std::vector<std::int32_t> final_id(stats.size());
  ComponentLabeling result;
  result.stats.reserve(stats.size());
  const double voxel = in.grid().voxel_volume();
  for (std::size_t k = 0; k < order.size(); ++k) {
    final_id[order[k]] = static_cast<std::int32_t>(k + 1);
    ComponentStats c = stats[order[k]];
    c.component_id = static_cast<std::int32_t>(k + 1);
    c.volume_mm3 = static_cast<double>(c.voxel_count) * voxel;
    c.centroid_mm = in.grid().to_world(sums[order[k]] / static_cast<double>(c.voxel_count));
    result.stats.push_back(c);
  }
  for (auto& p : provisional)
    if (p != 0) p = final_id[static_cast<std::size_t>(p - 1)];
  result.components = std::move(out);
  return result;
}

}  // namespace

ComponentLabeling connected_components(const Mask& mask, Connectivity connectivity) {
  return label_impl(mask, connectivity, true);
}

ComponentLabeling label_components(const LabelMap& labels, Connectivity connectivity) {
  return label_impl(labels, connectivity, false);
}

}  // namespace torsoseg
