#include "torsoseg/vertebrae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "torsoseg/components.hpp"
#include "torsoseg/stats.hpp"

namespace torsoseg {

std::string_view to_string(SpineAnomalyKind k) {
  switch (k) {
    case SpineAnomalyKind::merged_suspect: return "merged_suspect";
    case SpineAnomalyKind::gap_suspect: return "gap_suspect";
    case SpineAnomalyKind::count_overflow: return "count_overflow";
  }
  return "unknown";
}

namespace {

double world_si(const GridSpec& g, std::int64_t x, std::int64_t y, std::int64_t z) {
  return g.to_world(Vec3(double(x), double(y), double(z)))[2];
}

struct Piece {
  std::vector<std::size_t> voxels;
  Vec3 index_sum = Vec3::Zero();
  double si_min = std::numeric_limits<double>::infinity();
  double si_max = -std::numeric_limits<double>::infinity();
};

}  // namespace

InstanceLabelResult instance_label(const Mask& vertebra_body, const Mask* ivd,
                                   const InstanceLabelParams& params) {
  if (params.start_level < kFirstLevelId || params.start_level > kLastLevelId)
    throw ValidationError("start level must lie within C3..L5");
  if (ivd) require_same_grid(vertebra_body.grid(), ivd->grid(), "vertebra and IVD masks");
  const auto& grid = vertebra_body.grid();
  const auto cc = connected_components(vertebra_body, Connectivity::corners);
  if (cc.stats.empty()) throw ValidationError("vertebra body mask is empty");

  // Axial planes (world SI coordinate) through each IVD component centroid.
  std::vector<double> planes;
  if (ivd) {
    const auto disc = connected_components(*ivd, Connectivity::corners);
    for (const auto& d : disc.stats) planes.push_back(d.centroid_mm[2]);
    std::sort(planes.begin(), planes.end());
  }

  std::vector<Piece> comps(cc.stats.size());
  const auto& s = vertebra_body.shape();
  const auto labels = cc.components.data();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        const std::size_t i = vertebra_body.linear(x, y, z);
        if (labels[i] == 0) continue;
        auto& p = comps[static_cast<std::size_t>(labels[i] - 1)];
        const double w = world_si(grid, x, y, z);
        p.voxels.push_back(i);
        p.si_min = std::min(p.si_min, w);
        p.si_max = std::max(p.si_max, w);
      }

  // Split at interior IVD planes: voxels at or above a plane go superior.
  std::vector<Piece> pieces;
  std::vector<std::int32_t> piece_source;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::vector<double> cuts;
    for (const double p : planes)
      if (p > comps[c].si_min && p < comps[c].si_max) cuts.push_back(p);
    std::vector<Piece> parts(cuts.size() + 1);
    for (const auto i : comps[c].voxels) {
      const auto idx = vertebra_body.unravel(i);
      const double w = world_si(grid, idx[0], idx[1], idx[2]);
      const auto seg = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), w) - cuts.begin());
      auto& part = parts[seg];
      part.voxels.push_back(i);
      part.index_sum += Vec3(double(idx[0]), double(idx[1]), double(idx[2]));
      part.si_min = std::min(part.si_min, w);
      part.si_max = std::max(part.si_max, w);
    }
    for (auto& part : parts)
      if (!part.voxels.empty()) {
        pieces.push_back(std::move(part));
        piece_source.push_back(cc.stats[c].component_id);
      }
  }

  const double voxel = grid.voxel_volume();
  const double slice = grid.spacing()[grid.axial_axis()];
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < pieces.size(); ++k)
    if (double(pieces[k].voxels.size()) * voxel >= params.min_volume_mm3) kept.push_back(k);
  auto centroid = [&](std::size_t k) {
    return grid.to_world(pieces[k].index_sum / double(pieces[k].voxels.size()));
  };
  std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
    return centroid(a)[2] > centroid(b)[2];
  });

  InstanceLabelResult result{LabelMap(grid), {}};
  std::int32_t level = params.start_level;
  for (const auto k : kept) {
    const auto& p = pieces[k];
    const Vec3 c = centroid(k);
    if (level > kLastLevelId) {
      result.report.anomalies.push_back({SpineAnomalyKind::count_overflow, 0, c,
                                         "component below L5 left unlabeled"});
      continue;
    }
    for (const auto i : p.voxels) result.instances[i] = level;
    result.report.assigned.push_back({level, level_name(level), piece_source[k],
                                      double(p.voxels.size()) * voxel, c,
                                      p.si_max - p.si_min + slice});
    ++level;
  }
  return result;
}

SpineReport detect_anomalies(const LabelMap& instances, const SpineReport& report,
                             const AnomalyParams& params) {
  SpineReport out = report;
  if (report.assigned.empty()) return out;
  const auto& grid = instances.grid();
  const double slice = grid.spacing()[grid.axial_axis()];

  std::map<std::int32_t, std::pair<double, double>> range;
  const auto& s = instances.shape();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        const auto v = instances(x, y, z);
        if (v == 0) continue;
        const double w = world_si(grid, x, y, z);
        auto [it, inserted] = range.try_emplace(v, w, w);
        if (!inserted) {
          it->second.first = std::min(it->second.first, w);
          it->second.second = std::max(it->second.second, w);
        }
      }

  std::vector<double> extents;
  for (auto& a : out.assigned) {
    const auto it = range.find(a.level_id);
    if (it != range.end()) a.si_extent_mm = it->second.second - it->second.first + slice;
    extents.push_back(a.si_extent_mm);
  }
  const double median_extent = median(extents);
  for (const auto& a : out.assigned)
    if (a.si_extent_mm > params.extent_factor * median_extent) {
      std::ostringstream os;
      os << a.level << " spans " << a.si_extent_mm << " mm, median " << median_extent << " mm";
      out.anomalies.push_back({SpineAnomalyKind::merged_suspect, a.level_id, a.centroid_mm, os.str()});
    }

  if (out.assigned.size() >= 2) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < out.assigned.size(); ++i)
      gaps.push_back((out.assigned[i].centroid_mm - out.assigned[i - 1].centroid_mm).norm());
    const double median_gap = median(gaps);
    for (std::size_t i = 1; i < out.assigned.size(); ++i)
      if (gaps[i - 1] > params.spacing_factor * median_gap) {
        const auto& up = out.assigned[i - 1];
        const auto& down = out.assigned[i];
        std::ostringstream os;
        os << up.level << "-" << down.level << " centroids " << gaps[i - 1] << " mm apart, median "
           << median_gap << " mm";
        out.anomalies.push_back({SpineAnomalyKind::gap_suspect, up.level_id,
                                 0.5 * (up.centroid_mm + down.centroid_mm), os.str()});
      }
  }
  return out;
}

std::string spine_report_json(const SpineReport& report) {
  nlohmann::ordered_json j;
  auto vec = [](const Vec3& v) { return nlohmann::ordered_json::array({v[0], v[1], v[2]}); };
  auto& levels = j["assigned_levels"] = nlohmann::ordered_json::array();
  for (const auto& a : report.assigned)
    levels.push_back({{"level", a.level},
                      {"level_id", a.level_id},
                      {"component_id", a.component_id},
                      {"volume_mm3", a.volume_mm3},
                      {"centroid_mm", vec(a.centroid_mm)},
                      {"si_extent_mm", a.si_extent_mm}});
  auto& anomalies = j["anomalies"] = nlohmann::ordered_json::array();
  for (const auto& a : report.anomalies)
    anomalies.push_back({{"kind", to_string(a.kind)},
                         {"level_id", a.level_id},
                         {"location_mm", vec(a.location_mm)},
                         {"detail", a.detail}});
  return j.dump(2);
}

}  // namespace torsoseg
