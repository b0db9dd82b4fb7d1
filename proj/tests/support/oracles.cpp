#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <unistd.h>

namespace torsoseg::testing {

Mask random_mask(const Shape3& shape, double density, std::mt19937_64& rng, const Vec3& spacing) {
  Mask m(GridSpec::axis_aligned(shape, spacing));
  std::bernoulli_distribution on(density);
  for (auto& v : m.values()) v = on(rng) ? 1 : 0;
  return m;
}

LabelMap random_labels(const Shape3& shape, int classes, std::mt19937_64& rng) {
  LabelMap m(GridSpec::axis_aligned(shape, Vec3::Ones()));
  std::uniform_int_distribution<int> pick(0, classes);
  for (auto& v : m.values()) v = pick(rng);
  return m;
}

LabelMap bfs_components(const Mask& mask, int connectivity) {
  std::vector<Index3> offsets;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int order = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (order == 0) continue;
        if (connectivity == 6 && order > 1) continue;
        if (connectivity == 18 && order > 2) continue;
        offsets.push_back({dx, dy, dz});
      }
  LabelMap out(mask.grid());
  const auto& s = mask.shape();
  std::int32_t next = 0;
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        if (!mask(x, y, z) || out(x, y, z)) continue;
        ++next;
        std::deque<Index3> queue{{x, y, z}};
        out(x, y, z) = next;
        while (!queue.empty()) {
          const auto p = queue.front();
          queue.pop_front();
          for (const auto& o : offsets) {
            const Index3 q = {p[0] + o[0], p[1] + o[1], p[2] + o[2]};
            if (!mask.contains(q[0], q[1], q[2])) continue;
            if (!mask(q[0], q[1], q[2]) || out(q[0], q[1], q[2])) continue;
            out(q[0], q[1], q[2]) = next;
            queue.push_back(q);
          }
        }
      }
  return out;
}

bool same_partition(const LabelMap& a, const LabelMap& b) {
  if (a.size() != b.size()) return false;
  std::map<std::int32_t, std::int32_t> ab, ba;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const auto x = a[i], y = b[i];
    if ((x == 0) != (y == 0)) return false;
    if (x == 0) continue;
    auto [it, fresh] = ab.emplace(x, y);
    if (!fresh && it->second != y) return false;
    auto [jt, fresh2] = ba.emplace(y, x);
    if (!fresh2 && jt->second != x) return false;
  }
  return true;
}

std::optional<double> brute_dice(const Mask& a, const Mask& b) {
  std::int64_t na = 0, nb = 0, both = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (a[i]) ++na;
    if (b[i]) ++nb;
    if (a[i] && b[i]) ++both;
  }
  if (na == 0 && nb == 0) return std::nullopt;
  if (na == 0 || nb == 0) return 0.0;
  return 2.0 * double(both) / double(na + nb);
}

namespace {

std::vector<Index3> surface(const Mask& m) {
  std::vector<Index3> out;
  const auto& s = m.shape();
  const Index3 nb[6] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        if (!m(x, y, z)) continue;
        bool edge = false;
        for (const auto& o : nb) {
          const auto qx = x + o[0], qy = y + o[1], qz = z + o[2];
          if (!m.contains(qx, qy, qz) || !m(qx, qy, qz)) edge = true;
        }
        if (edge) out.push_back({x, y, z});
      }
  return out;
}

double nearest(const Index3& p, const std::vector<Index3>& others, const Vec3& sp) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : others) {
    const double dx = double(p[0] - q[0]) * sp[0];
    const double dy = double(p[1] - q[1]) * sp[1];
    const double dz = double(p[2] - q[2]) * sp[2];
    best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  return best;
}

}  // namespace

std::optional<double> allpairs_assd(const Mask& a, const Mask& b, const Vec3& spacing) {
  const auto sa = surface(a), sb = surface(b);
  if (sa.empty() || sb.empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& p : sa) total += nearest(p, sb, spacing);
  for (const auto& p : sb) total += nearest(p, sa, spacing);
  return total / double(sa.size() + sb.size());
}

LabelMap first_claimant_merge(const std::vector<std::pair<std::int32_t, Mask>>& masks, const LabelSchema& schema) {
  std::vector<std::size_t> order(masks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto rank = [&](std::size_t i) {
    const auto* def = schema.find(masks[i].first);
    const int priority = def ? def->merge_priority : std::numeric_limits<int>::max();
    return std::make_pair(priority, masks[i].first);
  };
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return rank(x) < rank(y); });
  LabelMap out(masks.front().second.grid());
  for (std::int64_t v = 0; v < out.size(); ++v)
    for (const auto i : order)
      if (masks[i].second[v]) {
        out[v] = masks[i].first;
        break;
      }
  return out;
}

LabelMap reference_fuse(const TilePlan& plan, const Image& image, PatchOracle& oracle) {
  const auto& ps = plan.patch_shape;
  const std::int64_t n = ps[0] * ps[1] * ps[2];
  const int classes = oracle.num_classes();
  const auto w = kernel_weights(plan);
  std::vector<float> acc(static_cast<std::size_t>(classes * image.size()), 0.0f);
  std::vector<float> wsum(static_cast<std::size_t>(image.size()), 0.0f);
  std::vector<float> patch(static_cast<std::size_t>(n)), scores(static_cast<std::size_t>(classes * n));
  for (const auto& o : plan.origins) {
    std::int64_t k = 0;
    for (std::int64_t z = 0; z < ps[2]; ++z)
      for (std::int64_t y = 0; y < ps[1]; ++y)
        for (std::int64_t x = 0; x < ps[0]; ++x) patch[k++] = image(o[0] + x, o[1] + y, o[2] + z);
    std::fill(scores.begin(), scores.end(), 0.0f);
    oracle.evaluate(PatchInput{patch, {}, ps, o}, scores);
    k = 0;
    for (std::int64_t z = 0; z < ps[2]; ++z)
      for (std::int64_t y = 0; y < ps[1]; ++y)
        for (std::int64_t x = 0; x < ps[0]; ++x, ++k) {
          const auto v = image.linear(o[0] + x, o[1] + y, o[2] + z);
          for (int c = 0; c < classes; ++c) acc[c * image.size() + v] += w[k] * scores[c * n + k];
          wsum[v] += w[k];
        }
  }
  LabelMap out(image.grid());
  for (std::int64_t v = 0; v < image.size(); ++v) {
    int best = 0;
    float best_score = acc[v] / wsum[v];
    for (int c = 1; c < classes; ++c) {
      const float s = acc[c * image.size() + v] / wsum[v];
      if (s > best_score) best = c, best_score = s;
    }
    out[v] = best;
  }
  return out;
}

void HashOracle::evaluate(const PatchInput& p, std::span<float> scores) {
  const std::int64_t n = p.shape[0] * p.shape[1] * p.shape[2];
  std::int64_t k = 0;
  for (std::int64_t z = 0; z < p.shape[2]; ++z)
    for (std::int64_t y = 0; y < p.shape[1]; ++y)
      for (std::int64_t x = 0; x < p.shape[0]; ++x, ++k)
        for (int c = 0; c < classes_; ++c) {
          std::uint64_t h = seed_;
          for (const std::int64_t v : {p.origin[0] + x, p.origin[1] + y, p.origin[2] + z, p.origin[0],
                                       p.origin[2], std::int64_t(c)}) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 33;
          }
          scores[c * n + k] = static_cast<float>(h >> 40) / float(1 << 24);
        }
}

TempDir::TempDir() {
  auto base = std::filesystem::temp_directory_path() / ("torsoseg-test-XXXXXX");
  std::string templ = base.string();
  if (!::mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

SpinePhantom spine_phantom(int count, int fused, int missing) {
  // Blob k: 8 slices of vertebral body, then 2 slices of disc, 2 mm slices,
  // 10x10 mm cross-section on a 1x1x2 mm grid. Superior = high z.
  const std::int64_t period = 10, body_slices = 8;
  const std::int64_t nz = period * count + 4;
  const Vec3 spacing(1.0, 1.0, 2.0);
  SpinePhantom p{Mask(GridSpec::axis_aligned({20, 20, nz}, spacing)),
                 Mask(GridSpec::axis_aligned({20, 20, nz}, spacing)), {}};
  for (int k = 0; k < count; ++k) {
    const std::int64_t top = nz - 3 - k * period;  // highest slice of blob k
    const std::int64_t bottom = top - body_slices + 1;
    if (k != missing) fill_box<std::uint8_t>(p.body, {5, 5, bottom}, {14, 14, top}, 1);
    if (k == fused) {
      fill_box<std::uint8_t>(p.body, {5, 5, bottom - 2}, {14, 14, bottom - 1}, 1);
    } else if (k + 1 < count) {
      fill_box<std::uint8_t>(p.ivd, {5, 5, bottom - 2}, {14, 14, bottom - 1}, 1);
    }
    p.centre_si_mm.push_back(double(top + bottom) / 2.0 * spacing[2]);
  }
  return p;
}

}  // namespace torsoseg::testing
