#include "distance.hpp"

#include <algorithm>
#include <limits>

namespace torsoseg::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas over one line (Felzenszwalb & Huttenlocher),
// sample positions i*step. Entries of f equal to infinity are not sites.
void transform_line(const double* f, double* d, std::int64_t n, double step,
                    std::vector<std::int64_t>& v, std::vector<double>& z) {
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  std::int64_t k = -1;
  for (std::int64_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double pq = double(q) * step;
    while (k >= 0) {
      const double pv = double(v[k]) * step;
      const double s = ((f[q] + pq * pq) - (f[v[k]] + pv * pv)) / (2.0 * (pq - pv));
      if (s <= z[k]) {
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
      break;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
    }
  }
  if (k < 0) {
    for (std::int64_t q = 0; q < n; ++q) d[q] = kInf;
    return;
  }
  std::int64_t j = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    const double pq = double(q) * step;
    while (z[j + 1] < pq) ++j;
    const double diff = double(q - v[j]) * step;
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& seeds,
                                               const Shape3& shape, const Vec3& spacing) {
  const std::int64_t nx = shape[0], ny = shape[1], nz = shape[2];
  std::vector<double> dist(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) dist[i] = seeds[i] ? 0.0 : kInf;

  std::vector<std::int64_t> v;
  std::vector<double> z;
  const std::int64_t longest = std::max({nx, ny, nz});
  std::vector<double> in(static_cast<std::size_t>(longest)), out(in.size());

  const std::int64_t stride[3] = {1, nx, nx * ny};
  const std::int64_t len[3] = {nx, ny, nz};
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3, b = (axis + 2) % 3;
    for (std::int64_t j = 0; j < len[b]; ++j)
      for (std::int64_t i = 0; i < len[a]; ++i) {
        const std::int64_t base = i * stride[a] + j * stride[b];
        const std::int64_t n = len[axis];
        for (std::int64_t q = 0; q < n; ++q) in[q] = dist[base + q * stride[axis]];
        transform_line(in.data(), out.data(), n, spacing[axis], v, z);
        for (std::int64_t q = 0; q < n; ++q) dist[base + q * stride[axis]] = out[q];
      }
  }
  return dist;
}

}  // namespace torsoseg::detail
