#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "torsoseg/vertebrae.hpp"

using namespace torsoseg;
namespace ts = torsoseg::testing;

namespace {

std::vector<SpineAnomaly> anomalies_of(const InstanceLabelResult& r, SpineAnomalyKind kind) {
  const auto rep = detect_anomalies(r.instances, r.report);
  std::vector<SpineAnomaly> out;
  for (const auto& a : rep.anomalies)
    if (a.kind == kind) out.push_back(a);
  return out;
}

std::size_t anomaly_count(const InstanceLabelResult& r) {
  return detect_anomalies(r.instances, r.report).anomalies.size();
}

}  // namespace

TEST(Vertebrae, TwentyTwoBlobsGetC3ToL5) {
  const auto p = ts::spine_phantom(22);
  const auto r = instance_label(p.body, &p.ivd);
  ASSERT_EQ(r.report.assigned.size(), 22u);
  for (int k = 0; k < 22; ++k) {
    const auto& a = r.report.assigned[std::size_t(k)];
    EXPECT_EQ(a.level_id, kFirstLevelId + k);
    EXPECT_NEAR(a.centroid_mm[2], p.centre_si_mm[std::size_t(k)], 1e-9);
    EXPECT_DOUBLE_EQ(a.volume_mm3, 1600.0);
    EXPECT_DOUBLE_EQ(a.si_extent_mm, 16.0);
  }
  EXPECT_EQ(r.report.assigned.front().level, "C3");
  EXPECT_EQ(r.report.assigned.back().level, "L5");
  EXPECT_EQ(anomaly_count(r), 0u);
  // Every body voxel is labelled, nothing else is.
  for (std::int64_t i = 0; i < p.body.size(); ++i) ASSERT_EQ(r.instances[i] != 0, p.body[i] != 0);
}

TEST(Vertebrae, SingleBlobGetsStartLevel) {
  const auto p = ts::spine_phantom(1);
  InstanceLabelParams params;
  params.start_level = *level_id("T7");
  const auto r = instance_label(p.body, nullptr, params);
  ASSERT_EQ(r.report.assigned.size(), 1u);
  EXPECT_EQ(r.report.assigned[0].level, "T7");
  EXPECT_EQ(anomaly_count(r), 0u);
}

TEST(Vertebrae, FusedBlobsSplitAtDiscPlane) {
  auto p = ts::spine_phantom(4, 1);
  // Disc slab overlapping the bridge between blobs 1 and 2.
  const std::int64_t bottom1 = p.body.shape()[2] - 3 - 10 - 7;
  ts::fill_box<std::uint8_t>(p.ivd, {5, 5, bottom1 - 2}, {14, 14, bottom1 - 1}, 1);
  const auto r = instance_label(p.body, &p.ivd);
  ASSERT_EQ(r.report.assigned.size(), 4u);
  // Plane at bottom1 - 1.5: slice bottom1 - 1 goes up, bottom1 - 2 goes down.
  EXPECT_EQ(r.instances(9, 9, bottom1 - 1), kFirstLevelId + 1);
  EXPECT_EQ(r.instances(9, 9, bottom1 - 2), kFirstLevelId + 2);
  EXPECT_EQ(anomaly_count(r), 0u);
}

TEST(Vertebrae, DoubleHeightBlobFlaggedOnce) {
  const auto p = ts::spine_phantom(22, 5);
  const auto r = instance_label(p.body, &p.ivd);
  ASSERT_EQ(r.report.assigned.size(), 21u);
  const auto merged = anomalies_of(r, SpineAnomalyKind::merged_suspect);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].level_id, kFirstLevelId + 5);
  EXPECT_EQ(anomaly_count(r), 1u);
}

TEST(Vertebrae, MissingBlobFlaggedAsGapOnce) {
  const auto p = ts::spine_phantom(22, -1, 8);
  const auto r = instance_label(p.body, &p.ivd);
  ASSERT_EQ(r.report.assigned.size(), 21u);
  const auto gaps = anomalies_of(r, SpineAnomalyKind::gap_suspect);
  ASSERT_EQ(gaps.size(), 1u);
  EXPECT_EQ(gaps[0].level_id, kFirstLevelId + 7);
  // Midpoint of the neighbours is the missing blob's centre.
  EXPECT_NEAR(gaps[0].location_mm[2], p.centre_si_mm[8], 1e-9);
  EXPECT_EQ(anomaly_count(r), 1u);
}

TEST(Vertebrae, OverflowPastL5) {
  const auto p = ts::spine_phantom(6);
  InstanceLabelParams params;
  params.start_level = *level_id("L2");
  const auto r = instance_label(p.body, &p.ivd, params);
  EXPECT_EQ(r.report.assigned.size(), 4u);
  EXPECT_EQ(r.report.assigned.back().level, "L5");
  std::size_t overflow = 0;
  for (const auto& a : r.report.anomalies) overflow += a.kind == SpineAnomalyKind::count_overflow;
  EXPECT_EQ(overflow, 2u);
  // The two lowest blobs stay unlabelled.
  EXPECT_EQ(r.instances(9, 9, 4), 0);
}

TEST(Vertebrae, SmallComponentsIgnored) {
  auto p = ts::spine_phantom(3);
  ts::fill_box<std::uint8_t>(p.body, {0, 0, 1}, {2, 2, 1}, 1);  // 18 mm3 speck
  const auto r = instance_label(p.body, &p.ivd);
  EXPECT_EQ(r.report.assigned.size(), 3u);
  EXPECT_EQ(r.instances(1, 1, 1), 0);
}

TEST(Vertebrae, TranslationInvariant) {
  const auto p = ts::spine_phantom(10, 3);
  const auto a = instance_label(p.body, &p.ivd);
  const auto shifted_grid =
      GridSpec::axis_aligned(p.body.shape(), p.body.spacing(), Vec3(-120.0, 37.5, 912.0));
  const Mask body(shifted_grid, p.body.values());
  const Mask ivd(shifted_grid, p.ivd.values());
  const auto b = instance_label(body, &ivd);
  EXPECT_EQ(a.instances.values(), b.instances.values());
  EXPECT_EQ(anomaly_count(a), anomaly_count(b));
}

TEST(Vertebrae, ReportJson) {
  const auto p = ts::spine_phantom(22, -1, 8);
  const auto r = instance_label(p.body, &p.ivd);
  const auto json = spine_report_json(detect_anomalies(r.instances, r.report));
  EXPECT_NE(json.find("\"assigned_levels\""), std::string::npos);
  EXPECT_NE(json.find("gap_suspect"), std::string::npos);
}

TEST(Vertebrae, Errors) {
  const auto p = ts::spine_phantom(2);
  InstanceLabelParams params;
  params.start_level = 99;
  EXPECT_THROW(instance_label(p.body, nullptr, params), ValidationError);
  const Mask other(GridSpec::axis_aligned({3, 3, 3}, Vec3::Ones()));
  EXPECT_THROW(instance_label(p.body, &other), ValidationError);
}
