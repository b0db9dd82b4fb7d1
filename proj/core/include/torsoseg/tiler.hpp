#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

inline constexpr Shape3 kDefaultPatch = {224, 224, 64};

enum class WeightKernel { uniform, gaussian };

struct TilePlan {
  Shape3 volume_shape{};
  Shape3 patch_shape{};
  Shape3 step{};
  std::vector<Index3> origins;  // z-major: sorted by z origin, then y, then x
  WeightKernel kernel = WeightKernel::gaussian;
};

// step = ceil(patch * (1 - overlap)); per axis the origins are i*step with
// the last one clamped so the tile ends at the volume boundary.
TilePlan plan_tiles(const Shape3& volume_shape, const Shape3& patch_shape = kDefaultPatch,
                    double overlap = 0.5, WeightKernel kernel = WeightKernel::gaussian);

// Patch-shaped weights, x fastest. Gaussian: sigma = patch/8 per axis,
// centred at (patch-1)/2, peak 1. Uniform: all 1.
std::vector<float> kernel_weights(const TilePlan& plan);

struct PatchInput {
  std::span<const float> image;      // patch voxels, x fastest
  std::span<const float> quadrants;  // empty or same size as image
  Shape3 shape{};
  Index3 origin{};  // patch position within the volume
};

class PatchOracle {
 public:
  virtual ~PatchOracle() = default;
  virtual int num_classes() const = 0;
  // scores holds num_classes() blocks of voxel_count values (class-major).
  virtual void evaluate(const PatchInput& patch, std::span<float> scores) = 0;
};

enum class AccumulatorPrecision { f32, f16 };

struct FusionConfig {
  std::size_t memory_budget = std::size_t{2} << 30;
  AccumulatorPrecision precision = AccumulatorPrecision::f32;
};

struct FusionResult {
  LabelMap labels;
  std::int64_t chunk_depth = 0;
  // Bytes held by score and weight-sum accumulators at their peak.
  std::size_t peak_accumulator_bytes = 0;
  std::size_t oracle_calls = 0;
};

// Bytes per accumulated value for a precision.
std::size_t accumulator_bytes(AccumulatorPrecision p);

// Weighted average of oracle scores over tiles, then argmax (ties to the lower
// class). Accumulators cover a ring of chunk_depth slices along z, which is
// the largest depth whose (classes + 1) buffers fit the budget, capped at the
// volume depth. Slices below the next tile's z origin are finalized and freed.
FusionResult fuse(const TilePlan& plan, const Image& image, PatchOracle& oracle,
                  const FusionConfig& cfg = {}, const LabelMap* quadrants = nullptr);

// IEEE binary16 conversion, round to nearest even.
std::uint16_t float_to_half(float f);
float half_to_float(std::uint16_t h);

// Deterministic test oracles.
std::unique_ptr<PatchOracle> constant_oracle(int class_id);    // one-hot class_id
std::unique_ptr<PatchOracle> threshold_oracle(float threshold);  // class 1 where value > t
std::unique_ptr<PatchOracle> identity_oracle(int num_classes);   // class round(value), clamped to [0, n)
std::unique_ptr<PatchOracle> checkerboard_oracle();             // class (x+y+z) mod 2, global coords

// Runs `command` through /bin/sh once and exchanges one message pair per
// patch over its stdin/stdout.
//   request:  "TSPR", int32 channels, nx, ny, nz, ox, oy, oz, then
//             channels * nx*ny*nz float32 (image first, then quadrants)
//   response: "TSPS", int32 num_classes, nx, ny, nz, then
//             num_classes * nx*ny*nz float32, class-major
// All values little-endian, x fastest.
std::unique_ptr<PatchOracle> subprocess_oracle(const std::string& command, int num_classes);

// "mock:constant:<c>", "mock:threshold:<t>", "mock:identity:<n>", "mock:checkerboard" or
// "exec:<command>" (needs num_classes > 0).
std::unique_ptr<PatchOracle> make_oracle(const std::string& spec, int num_classes = 0);

// Pads `image` with zeros at the high end of each axis up to `minimum`.
Image pad_to(const Image& image, const Shape3& minimum);

struct InferParams {
  Shape3 patch = kDefaultPatch;
  double overlap = 0.5;
  WeightKernel kernel = WeightKernel::gaussian;
  FusionConfig fusion;
};

// Pads to the patch size where needed, plans, fuses and crops back.
FusionResult infer(const Image& image, PatchOracle& oracle, const InferParams& params = {},
                   const LabelMap* quadrants = nullptr);

}  // namespace torsoseg
