#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "torsoseg/orientation.hpp"
#include "torsoseg/schema.hpp"

using namespace torsoseg;
namespace ts = torsoseg::testing;

namespace {

std::int32_t id_of(const LabelSchema& s, std::string_view name) {
  const auto* c = s.find(name);
  if (!c) throw std::runtime_error("no class " + std::string(name));
  return c->id;
}

LabelMap filled(std::int32_t value, Shape3 shape = {4, 4, 4}) {
  return LabelMap(GridSpec::axis_aligned(shape, Vec3(1.5, 1.5, 3.0)), value);
}

// 40 x 20 x 20 phantom, RAS axis-aligned: x grows towards the subject's left
// in index space is *not* the case here; world x = +right, so small world x
// (low index after the negative-x origin) is the left side.
LabelMap lateral_phantom(const LabelSchema& s, const std::vector<std::string>& pairs) {
  Affine a = Affine::Identity();
  a(0, 0) = -1.0;  // voxel x increases towards the subject's left
  LabelMap l(GridSpec(Shape3{40, 20, 20}, a));
  ts::fill_box<std::int32_t>(l, {0, 0, 0}, {39, 19, 1}, id_of(s, "outer_skin"));
  std::int64_t y = 3;
  for (const auto& base : pairs) {
    // Left class at high voxel x (world x negative), right class at low x.
    ts::fill_box<std::int32_t>(l, {30, y, 5}, {34, y + 2, 9}, id_of(s, base + "_left"));
    ts::fill_box<std::int32_t>(l, {5, y, 5}, {9, y + 2, 9}, id_of(s, base + "_right"));
    y += 4;
  }
  return l;
}

}  // namespace

TEST(BuiltinSchema, HasSeventyOneClassesAndTwentyTwoLevels) {
  // "71 semantic tissue classes"; "up to 22 instance labels (... C3-L5)".
  const auto& s = builtin_schema();
  EXPECT_EQ(s.classes().size(), 71u);
  EXPECT_EQ(s.instances().size(), 22u);
  EXPECT_EQ(s.instances().front().level, "C3");
  EXPECT_EQ(s.instances().back().level, "L5");
  for (std::size_t i = 0; i < s.classes().size(); ++i) EXPECT_EQ(s.classes()[i].id, std::int32_t(i + 1));
  for (std::size_t i = 1; i < s.instances().size(); ++i)
    EXPECT_EQ(s.instances()[i].id, s.instances()[i - 1].id + 1);
}

TEST(BuiltinSchema, NewClassesPresent) {
  const auto& s = builtin_schema();
  for (const auto* name : {"intestine", "outer_skin", "muscle_other", "inner_fat", "intervertebral_disc",
                           "vertebra_body", "vertebra_posterior_elements", "spinal_channel", "bone_other"})
    EXPECT_NE(s.find(name), nullptr) << name;
  for (const auto* name : {"rib_left_1", "brain", "skull", "kidney_cyst_left", "colon", "small_bowel"})
    EXPECT_EQ(s.find(name), nullptr) << name;
}

TEST(BuiltinSchema, ChiralityPairsAreSymmetric) {
  const auto& s = builtin_schema();
  int left = 0, right = 0;
  for (const auto& c : s.classes()) {
    if (c.chirality == Chirality::none) {
      EXPECT_FALSE(c.partner_id.has_value()) << c.name;
      continue;
    }
    ASSERT_TRUE(c.partner_id.has_value()) << c.name;
    const auto* p = s.find(*c.partner_id);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->partner_id, c.id);
    EXPECT_NE(p->chirality, c.chirality);
    EXPECT_NE(p->chirality, Chirality::none);
    (c.chirality == Chirality::left ? left : right)++;
  }
  EXPECT_EQ(left, right);
  EXPECT_GT(left, 10);
}

TEST(BuiltinSchema, SingleComponentSet) {
  const auto& s = builtin_schema();
  std::set<std::string> expected = {"liver", "spleen", "stomach", "urinary_bladder", "prostate", "heart",
                                    "trachea", "sternum", "sacrum", "lung_middle_lobe_right"};
  for (const auto* base : {"lung_upper_lobe", "lung_lower_lobe", "kidney", "adrenal_gland", "hip", "femur",
                           "humerus", "scapula", "clavicula"}) {
    expected.insert(std::string(base) + "_left");
    expected.insert(std::string(base) + "_right");
  }
  std::set<std::string> got;
  for (const auto& c : s.classes())
    if (c.single_component) got.insert(c.name);
  EXPECT_EQ(got, expected);
}

TEST(BuiltinSchema, PrioritiesAndThresholds) {
  const auto& s = builtin_schema();
  const auto prio = [&](const char* n) { return s.find(n)->merge_priority; };
  EXPECT_LT(prio("aorta"), prio("vertebra_body"));
  EXPECT_LT(prio("vertebra_body"), prio("liver"));
  EXPECT_LT(prio("liver"), prio("gluteus_maximus_left"));
  EXPECT_LT(prio("gluteus_maximus_left"), prio("inner_fat"));
  EXPECT_DOUBLE_EQ(s.find("aorta")->min_component_volume_mm3, 200.0);
  EXPECT_DOUBLE_EQ(s.find("liver")->min_component_volume_mm3, 1000.0);
}

TEST(Schema, JsonRoundTripAndShippedFile) {
  const auto& s = builtin_schema();
  EXPECT_EQ(LabelSchema::from_json(s.to_json()), s);
  std::ifstream in(TORSOSEG_CATALOG_FILE);
  ASSERT_TRUE(in) << TORSOSEG_CATALOG_FILE;
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(LabelSchema::from_json(text.str()), s);
  EXPECT_EQ(LabelSchema::from_json(total_ct_catalog().to_json()), total_ct_catalog());
}

TEST(Schema, ConstructionValidates) {
  ClassDef a{1, "a_left", ClassGroup::organ, Chirality::left, 2, false, 0.0, 1};
  ClassDef b{2, "a_right", ClassGroup::organ, Chirality::right, 1, false, 0.0, 1};
  EXPECT_NO_THROW(LabelSchema("t", "1", {a, b}));
  auto dup = b;
  dup.id = 1;
  EXPECT_THROW(LabelSchema("t", "1", {a, dup}), ValidationError);
  auto lonely = b;
  lonely.partner_id = 7;
  EXPECT_THROW(LabelSchema("t", "1", {a, lonely}), ValidationError);
  auto same_side = b;
  same_side.chirality = Chirality::left;
  EXPECT_THROW(LabelSchema("t", "1", {a, same_side}), ValidationError);
  auto negative = b;
  negative.min_component_volume_mm3 = -1.0;
  EXPECT_THROW(LabelSchema("t", "1", {a, negative}), ValidationError);
  EXPECT_THROW(LabelSchema::from_json("{\"name\": 3}"), ValidationError);
}

TEST(Schema, DiffReportsChanges) {
  EXPECT_TRUE(diff_schemas(builtin_schema(), builtin_schema()).empty());
  auto classes = builtin_schema().classes();
  classes[0].min_component_volume_mm3 = 5.0;
  classes.pop_back();
  const LabelSchema changed("vibe-torso", "2", classes, builtin_schema().instances());
  const auto d = diff_schemas(builtin_schema(), changed);
  EXPECT_GE(d.size(), 3u);  // version, spleen threshold, removed class
}

TEST(Schema, LevelHelpers) {
  EXPECT_EQ(level_id("C3"), 3);
  EXPECT_EQ(level_id("T1"), 8);
  EXPECT_EQ(level_id("L5"), 24);
  EXPECT_FALSE(level_id("S1").has_value());
  EXPECT_EQ(level_name(19), "T12");
  EXPECT_EQ(level_name(2), "");
}

TEST(MapTotalCt, ColonAndSmallBowelBecomeIntestine) {
  const auto& ct = total_ct_catalog();
  const auto intestine = id_of(builtin_schema(), "intestine");
  for (const auto* name : {"colon", "small_bowel"}) {
    const auto r = map_total_ct(filled(id_of(ct, name)), ct);
    for (const auto v : r.labels.values()) ASSERT_EQ(v, intestine);
    ASSERT_EQ(r.report.mapped.size(), 1u);
    EXPECT_EQ(r.report.mapped[0].target_id, intestine);
  }
}

TEST(MapTotalCt, DroppedClassesCarryReasons) {
  const auto& ct = total_ct_catalog();
  const std::vector<std::pair<const char*, const char*>> cases = {
      {"rib_left_1", "Missing; Not reproduced due to time constrains"},
      {"brain", "Missing; Outside FOV"},
      {"skull", "Missing; Outside FOV"},
      {"kidney_cyst_left", "Out of scope for this work"}};
  for (const auto& [name, reason] : cases) {
    const auto r = map_total_ct(filled(id_of(ct, name)), ct);
    EXPECT_EQ(count_nonzero(r.labels), 0) << name;
    ASSERT_EQ(r.report.dropped.size(), 1u) << name;
    EXPECT_NE(r.report.dropped[0].reason.find(reason), std::string::npos) << r.report.dropped[0].reason;
  }
}

TEST(MapTotalCt, VertebraLevelsCollapseWithOneWarning) {
  const auto& ct = total_ct_catalog();
  LabelMap l = filled(0);
  l[0] = id_of(ct, "vertebrae_L1");
  l[1] = id_of(ct, "vertebrae_T12");
  const auto r = map_total_ct(l, ct);
  EXPECT_EQ(r.labels[0], id_of(builtin_schema(), "vertebra_body"));
  EXPECT_EQ(r.labels[1], id_of(builtin_schema(), "vertebra_body"));
  EXPECT_EQ(r.report.warnings.size(), 1u);
}

TEST(MapTotalCt, EmptyVolumeGivesEmptyReport) {
  const auto r = map_total_ct(filled(0), total_ct_catalog());
  EXPECT_EQ(count_nonzero(r.labels), 0);
  EXPECT_TRUE(r.report.mapped.empty());
  EXPECT_TRUE(r.report.dropped.empty());
  EXPECT_TRUE(r.report.warnings.empty());
}

TEST(MapTotalCt, EveryCtClassMappedOrDroppedAndOutputInCatalog) {
  const auto& ct = total_ct_catalog();
  LabelMap l(GridSpec::axis_aligned({int(ct.classes().size()) + 1, 1, 1}, Vec3::Ones()));
  for (std::size_t i = 0; i < ct.classes().size(); ++i) l[i] = ct.classes()[i].id;
  l[ct.classes().size()] = 5000;  // unknown
  const auto r = map_total_ct(l, ct);
  EXPECT_EQ(r.report.mapped.size() + r.report.dropped.size(), ct.classes().size() + 1);
  EXPECT_EQ(r.labels[ct.classes().size()], 0);
  for (const auto v : r.labels.values()) ASSERT_TRUE(v == 0 || builtin_schema().find(v) != nullptr) << v;
}

TEST(MapTotalCt, IdempotentOnMappedVolumes) {
  std::mt19937_64 rng(12);
  const auto& ct = total_ct_catalog();
  LabelMap l(GridSpec::axis_aligned({10, 10, 10}, Vec3::Ones()));
  std::uniform_int_distribution<std::size_t> pick(0, ct.classes().size() - 1);
  for (auto& v : l.values()) v = ct.classes()[pick(rng)].id;
  const auto once = map_total_ct(l, ct).labels;
  const auto twice = map_total_ct(once, builtin_schema()).labels;
  EXPECT_EQ(twice, once);
}

TEST(ValidateLabels, UnknownIdsAndVolumes) {
  LabelMap l = filled(0, {5, 4, 3});
  const auto liver = id_of(builtin_schema(), "liver");
  for (int i = 0; i < 7; ++i) l[i] = liver;
  auto v = validate_labels(l, builtin_schema());
  EXPECT_TRUE(v.unknown_ids.empty());
  ASSERT_EQ(v.present.size(), 1u);
  EXPECT_EQ(v.present[0].voxels, 7);
  EXPECT_DOUBLE_EQ(v.present[0].volume_mm3, 7 * 1.5 * 1.5 * 3.0);
  EXPECT_FALSE(v.empty_groups.empty());
  l[20] = 9999;
  v = validate_labels(l, builtin_schema());
  ASSERT_EQ(v.unknown_ids.size(), 1u);
  EXPECT_EQ(v.unknown_ids[0].first, 9999);
  EXPECT_EQ(v.unknown_ids[0].second, 1);
}

TEST(Laterality, CorrectPhantomHasNoFlags) {
  const auto& s = builtin_schema();
  const auto l = lateral_phantom(s, {"kidney", "humerus", "femur"});
  EXPECT_TRUE(laterality_check(l, s).empty());
}

TEST(Laterality, MirrorFlagsEveryPair) {
  const auto& s = builtin_schema();
  const auto l = lateral_phantom(s, {"kidney", "humerus", "femur"});
  const auto mirrored = flip_axis(l, l.grid().lateral_axis());
  const auto flags = laterality_check(mirrored, s);
  ASSERT_EQ(flags.size(), 3u);
  for (const auto& f : flags) EXPECT_EQ(f.verdict, LateralityVerdict::swapped);
}

TEST(Laterality, SingleSwapFlagsExactlyThatPair) {
  const auto& s = builtin_schema();
  auto l = lateral_phantom(s, {"kidney", "humerus", "femur"});
  const auto hl = id_of(s, "humerus_left"), hr = id_of(s, "humerus_right");
  for (auto& v : l.values()) v = v == hl ? hr : v == hr ? hl : v;
  const auto flags = laterality_check(l, s);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_EQ(flags[0].left_name, "humerus_left");
  EXPECT_EQ(flags[0].verdict, LateralityVerdict::swapped);
}

TEST(Laterality, CentredPairIsIndeterminate) {
  const auto& s = builtin_schema();
  LabelMap l(GridSpec::axis_aligned({21, 10, 10}, Vec3::Ones()));
  ts::fill_box<std::int32_t>(l, {10, 0, 0}, {10, 4, 4}, id_of(s, "kidney_left"));
  ts::fill_box<std::int32_t>(l, {10, 5, 5}, {10, 9, 9}, id_of(s, "kidney_right"));
  const auto flags = laterality_check(l, s);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_EQ(flags[0].verdict, LateralityVerdict::indeterminate);
}
