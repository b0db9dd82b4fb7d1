#include "torsoseg/tiler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace torsoseg {

TilePlan plan_tiles(const Shape3& volume_shape, const Shape3& patch_shape, double overlap,
                    WeightKernel kernel) {
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ValidationError("overlap fraction must lie in [0, 1)");
  TilePlan plan;
  plan.volume_shape = volume_shape;
  plan.patch_shape = patch_shape;
  plan.kernel = kernel;
  std::array<std::vector<std::int64_t>, 3> axis_origins;
  for (int a = 0; a < 3; ++a) {
    if (patch_shape[a] < 1) throw ValidationError("patch extent must be positive");
    if (patch_shape[a] > volume_shape[a])
      throw ValidationError("patch larger than volume on axis " + std::to_string(a) +
                            "; pad the volume first");
    const auto step = static_cast<std::int64_t>(std::ceil(double(patch_shape[a]) * (1.0 - overlap) - 1e-9));
    plan.step[a] = std::max<std::int64_t>(1, step);
    auto& o = axis_origins[a];
    for (std::int64_t i = 0;; ++i) {
      const std::int64_t v = std::min(i * plan.step[a], volume_shape[a] - patch_shape[a]);
      if (o.empty() || o.back() != v) o.push_back(v);
      if (v + patch_shape[a] >= volume_shape[a]) break;
    }
  }
  for (const auto z : axis_origins[2])
    for (const auto y : axis_origins[1])
      for (const auto x : axis_origins[0]) plan.origins.push_back({x, y, z});
  return plan;
}

std::vector<float> kernel_weights(const TilePlan& plan) {
  const auto& p = plan.patch_shape;
  std::vector<float> w(static_cast<std::size_t>(p[0] * p[1] * p[2]), 1.0f);
  if (plan.kernel == WeightKernel::uniform) return w;
  std::array<std::vector<double>, 3> g;
  for (int a = 0; a < 3; ++a) {
    const double sigma = double(p[a]) / 8.0;
    const double c = double(p[a] - 1) / 2.0;
    for (std::int64_t i = 0; i < p[a]; ++i) {
      const double d = (double(i) - c) / sigma;
      g[a].push_back(std::exp(-0.5 * d * d));
    }
  }
  double peak = 0.0;
  std::size_t k = 0;
  for (std::int64_t z = 0; z < p[2]; ++z)
    for (std::int64_t y = 0; y < p[1]; ++y)
      for (std::int64_t x = 0; x < p[0]; ++x) peak = std::max(peak, g[0][x] * g[1][y] * g[2][z]);
  for (std::int64_t z = 0; z < p[2]; ++z)
    for (std::int64_t y = 0; y < p[1]; ++y)
      for (std::int64_t x = 0; x < p[0]; ++x)
        w[k++] = static_cast<float>(g[0][x] * g[1][y] * g[2][z] / peak);
  return w;
}

std::size_t accumulator_bytes(AccumulatorPrecision p) {
  return p == AccumulatorPrecision::f16 ? 2 : 4;
}

std::uint16_t float_to_half(float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  const std::uint16_t sign = static_cast<std::uint16_t>((bits >> 16) & 0x8000u);
  const std::uint32_t exp = (bits >> 23) & 0xffu;
  std::uint32_t mant = bits & 0x7fffffu;
  if (exp == 0xff) return sign | 0x7c00u | (mant ? 0x200u : 0u);
  const int e = int(exp) - 127 + 15;
  if (e >= 31) return sign | 0x7c00u;
  if (e <= 0) {
    if (e < -10) return sign;
    mant |= 0x800000u;
    const int shift = 14 - e;
    std::uint32_t half = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1);
    const std::uint32_t mid = 1u << (shift - 1);
    if (rem > mid || (rem == mid && (half & 1u))) ++half;
    return static_cast<std::uint16_t>(sign | half);
  }
  std::uint32_t half = (std::uint32_t(e) << 10) | (mant >> 13);
  const std::uint32_t rem = mant & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;  // may carry into the exponent
  return static_cast<std::uint16_t>(sign | half);
}

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = std::uint32_t(h & 0x8000u) << 16;
  const std::uint32_t exp = (h >> 10) & 0x1fu;
  std::uint32_t mant = h & 0x3ffu;
  std::uint32_t bits;
  if (exp == 0) {
    if (mant == 0) {
      bits = sign;
    } else {
      int e = -1;
      do {
        ++e;
        mant <<= 1;
      } while (!(mant & 0x400u));
      bits = sign | (std::uint32_t(127 - 15 - e) << 23) | ((mant & 0x3ffu) << 13);
    }
  } else if (exp == 31) {
    bits = sign | 0x7f800000u | (mant << 13);
  } else {
    bits = sign | ((exp + 127 - 15) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(bits);
}

namespace {

// Score and weight-sum accumulators over a ring of `depth` z slices.
template <typename Store>
class RingAccumulator {
 public:
  RingAccumulator(std::int64_t classes, std::int64_t plane, std::int64_t depth)
      : classes_(classes), plane_(plane), depth_(depth),
        scores_(static_cast<std::size_t>(classes * plane * depth)),
        weights_(static_cast<std::size_t>(plane * depth)) {}

  std::size_t bytes() const { return (scores_.size() + weights_.size()) * sizeof(Store); }

  void add(std::int64_t z, std::int64_t in_plane, std::int64_t cls, float value) {
    auto& s = scores_[index(z, in_plane, cls)];
    s = store(load(s) + value);
  }
  void add_weight(std::int64_t z, std::int64_t in_plane, float value) {
    auto& s = weights_[static_cast<std::size_t>(ring(z) * plane_ + in_plane)];
    s = store(load(s) + value);
  }

  // Argmax of score / weight for slice z into out (plane_ values), then zeroes it.
  void finalize(std::int64_t z, std::int32_t* out) {
    const auto r = ring(z);
    for (std::int64_t i = 0; i < plane_; ++i) {
      auto& wslot = weights_[static_cast<std::size_t>(r * plane_ + i)];
      const float w = load(wslot);
      std::int32_t best = 0;
      float best_score = 0.0f;
      for (std::int64_t c = 0; c < classes_; ++c) {
        auto& slot = scores_[index(z, i, c)];
        const float v = w > 0.0f ? load(slot) / w : load(slot);
        if (c == 0 || v > best_score) {
          best = static_cast<std::int32_t>(c);
          best_score = v;
        }
        slot = Store{};
      }
      out[i] = best;
      wslot = Store{};
    }
  }

 private:
  std::int64_t ring(std::int64_t z) const { return z % depth_; }
  std::size_t index(std::int64_t z, std::int64_t in_plane, std::int64_t cls) const {
    return static_cast<std::size_t>((ring(z) * classes_ + cls) * plane_ + in_plane);
  }
  static float load(Store v) {
    if constexpr (std::is_same_v<Store, float>) return v;
    else return half_to_float(v);
  }
  static Store store(float v) {
    if constexpr (std::is_same_v<Store, float>) return v;
    else return float_to_half(v);
  }

  std::int64_t classes_, plane_, depth_;
  std::vector<Store> scores_;
  std::vector<Store> weights_;
};

template <typename Store>
FusionResult fuse_with(const TilePlan& plan, const Image& image, PatchOracle& oracle,
                       const LabelMap* quadrants, std::int64_t depth) {
  const auto& vs = plan.volume_shape;
  const auto& ps = plan.patch_shape;
  const std::int64_t classes = oracle.num_classes();
  const std::int64_t plane = vs[0] * vs[1];
  const std::int64_t patch_voxels = ps[0] * ps[1] * ps[2];
  const auto weights = kernel_weights(plan);

  FusionResult result;
  result.labels = LabelMap(image.grid());
  result.chunk_depth = depth;
  RingAccumulator<Store> acc(classes, plane, depth);
  result.peak_accumulator_bytes = acc.bytes();

  std::vector<float> patch(static_cast<std::size_t>(patch_voxels));
  std::vector<float> quad(quadrants ? patch.size() : 0);
  std::vector<float> scores(static_cast<std::size_t>(classes * patch_voxels));
  std::int64_t frontier = 0;  // slices below are finalized
  auto* out = result.labels.data().data();

  for (const auto& o : plan.origins) {
    for (; frontier < o[2]; ++frontier) acc.finalize(frontier, out + frontier * plane);
    std::size_t k = 0;
    for (std::int64_t z = 0; z < ps[2]; ++z)
      for (std::int64_t y = 0; y < ps[1]; ++y)
        for (std::int64_t x = 0; x < ps[0]; ++x, ++k) {
          const auto i = image.linear(o[0] + x, o[1] + y, o[2] + z);
          patch[k] = image[i];
          if (quadrants) quad[k] = static_cast<float>((*quadrants)[i]);
        }
    std::fill(scores.begin(), scores.end(), 0.0f);
    oracle.evaluate(PatchInput{patch, quad, ps, o}, scores);
    ++result.oracle_calls;
    k = 0;
    for (std::int64_t z = 0; z < ps[2]; ++z)
      for (std::int64_t y = 0; y < ps[1]; ++y)
        for (std::int64_t x = 0; x < ps[0]; ++x, ++k) {
          const std::int64_t gz = o[2] + z;
          const std::int64_t in_plane = (o[1] + y) * vs[0] + (o[0] + x);
          const float w = weights[k];
          for (std::int64_t c = 0; c < classes; ++c)
            acc.add(gz, in_plane, c, w * scores[static_cast<std::size_t>(c * patch_voxels) + k]);
          acc.add_weight(gz, in_plane, w);
        }
  }
  for (; frontier < vs[2]; ++frontier) acc.finalize(frontier, out + frontier * plane);
  return result;
}

}  // namespace

FusionResult fuse(const TilePlan& plan, const Image& image, PatchOracle& oracle, const FusionConfig& cfg,
                  const LabelMap* quadrants) {
  if (image.shape() != plan.volume_shape) throw ValidationError("tile plan does not match image shape");
  if (quadrants) require_same_grid(image.grid(), quadrants->grid(), "image and quadrant map");
  if (oracle.num_classes() < 2) throw ValidationError("oracle must produce at least two classes");
  for (std::size_t t = 1; t < plan.origins.size(); ++t)
    if (plan.origins[t][2] < plan.origins[t - 1][2])
      throw ValidationError("tile origins must be ordered by z");

  const auto& vs = plan.volume_shape;
  const std::size_t slice_bytes = std::size_t(oracle.num_classes() + 1) * std::size_t(vs[0] * vs[1]) *
                                  accumulator_bytes(cfg.precision);
  const auto fit = static_cast<std::int64_t>(cfg.memory_budget / slice_bytes);
  const std::int64_t depth = std::min(fit, vs[2]);
  if (depth < plan.patch_shape[2])
    throw ValidationError("memory budget of " + std::to_string(cfg.memory_budget) +
                          " bytes holds " + std::to_string(fit) + " accumulator slices; need " +
                          std::to_string(plan.patch_shape[2]) + " (" +
                          std::to_string(slice_bytes * std::size_t(plan.patch_shape[2])) + " bytes)");
  if (cfg.precision == AccumulatorPrecision::f16)
    return fuse_with<std::uint16_t>(plan, image, oracle, quadrants, depth);
  return fuse_with<float>(plan, image, oracle, quadrants, depth);
}

Image pad_to(const Image& image, const Shape3& minimum) {
  const auto& s = image.shape();
  const Shape3 shape = {std::max(s[0], minimum[0]), std::max(s[1], minimum[1]), std::max(s[2], minimum[2])};
  if (shape == s) return image;
  Image out(GridSpec(shape, image.affine()));
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      std::copy_n(&image(0, y, z), s[0], &out(0, y, z));
  return out;
}

FusionResult infer(const Image& image, PatchOracle& oracle, const InferParams& params,
                   const LabelMap* quadrants) {
  const auto& s = image.shape();
  const Image padded = pad_to(image, params.patch);
  LabelMap padded_quadrants;
  if (quadrants) {
    require_same_grid(image.grid(), quadrants->grid(), "image and quadrant map");
    padded_quadrants = LabelMap(padded.grid());
    for (std::int64_t z = 0; z < s[2]; ++z)
      for (std::int64_t y = 0; y < s[1]; ++y)
        std::copy_n(&(*quadrants)(0, y, z), s[0], &padded_quadrants(0, y, z));
  }
  const auto plan = plan_tiles(padded.shape(), params.patch, params.overlap, params.kernel);
  auto result = fuse(plan, padded, oracle, params.fusion, quadrants ? &padded_quadrants : nullptr);
  if (padded.shape() == s) return result;
  LabelMap cropped(image.grid());
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      std::copy_n(&result.labels(0, y, z), s[0], &cropped(0, y, z));
  result.labels = std::move(cropped);
  return result;
}

}  // namespace torsoseg
