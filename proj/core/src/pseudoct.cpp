#include "torsoseg/pseudoct.hpp"

#include <sstream>

#include "torsoseg/components.hpp"
#include "torsoseg/stats.hpp"

namespace torsoseg {

LabelMap find_background_and_lung(const Image& inphase, const BackgroundLungParams& params) {
  if (inphase.empty()) throw ValidationError("in-phase image is empty");
  if (!(params.threshold_fraction > 0 && params.threshold_fraction < 1))
    throw ValidationError("threshold fraction must lie in (0, 1)");
  for (const float v : inphase.data())
    if (v < 0) throw ValidationError("in-phase intensities must be non-negative");

  const double threshold = params.threshold_fraction * percentile(inphase.data(), 99.0);
  Mask low(inphase.grid());
  std::int64_t n_low = 0;
  for (std::size_t i = 0; i < low.values().size(); ++i) {
    low[i] = inphase[i] < threshold;
    n_low += low[i];
  }
  if (static_cast<double>(n_low) > 0.95 * static_cast<double>(inphase.size()))
    throw ValidationError("threshold selects more than 95% of voxels; image looks degenerate");

  const auto cc = connected_components(low, Connectivity::corners);
  const auto& s = inphase.shape();
  std::vector<std::int32_t> label_of(cc.stats.size() + 1, 0);
  for (const auto& c : cc.stats) {
    const auto& b = c.bbox;
    const bool touches = b[0] == 0 || b[1] == 0 || b[2] == 0 || b[3] == s[0] - 1 || b[4] == s[1] - 1 ||
                         b[5] == s[2] - 1;
    if (touches)
      label_of[static_cast<std::size_t>(c.component_id)] = kBackgroundLabel;
    else if (c.volume_mm3 >= params.min_lung_volume_mm3)
      label_of[static_cast<std::size_t>(c.component_id)] = kLungLabel;
  }
  LabelMap out(inphase.grid());
  const auto comp = cc.components.data();
  for (std::size_t i = 0; i < comp.size(); ++i) out[i] = label_of[static_cast<std::size_t>(comp[i])];
  return out;
}

PseudoCtResult make_pseudo_ct(const Image& water, const LabelMap& muscle, const LabelMap& background_lung) {
  require_same_grid(water.grid(), muscle.grid(), "water image and muscle mask");
  require_same_grid(water.grid(), background_lung.grid(), "water image and background/lung mask");
  Image out(water.grid());
  std::int64_t body = 0, very_low = 0;
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    float v = water[i];
    if (muscle[i] != 0) v *= kMuscleScale;
    if (background_lung[i] != 0) v -= kBackgroundLungOffset;
    out[i] = v;
    if (background_lung[i] != kBackgroundLabel) {
      ++body;
      very_low += v < -kBackgroundLungOffset;
    }
  }
  PseudoCtResult result{std::move(out), {}};
  if (body > 0 && static_cast<double>(very_low) > 0.01 * static_cast<double>(body)) {
    std::ostringstream os;
    os << 100.0 * static_cast<double>(very_low) / static_cast<double>(body)
       << "% of body voxels fall below -600; the water-image offsets may not suit this scanner";
    result.warnings.push_back(os.str());
  }
  return result;
}

}  // namespace torsoseg
