#include <array>

#include "torsoseg/schema.hpp"

namespace torsoseg {

namespace {

struct Defaults {
  int priority;
  double min_volume_mm3;
};

// vessels > spine structures > organs > muscles > body composition
Defaults defaults_for(ClassGroup g) {
  switch (g) {
    case ClassGroup::vessel: return {1, 200.0};
    case ClassGroup::spine: return {2, 200.0};
    case ClassGroup::organ:
    case ClassGroup::lung:
    case ClassGroup::digestion:
    case ClassGroup::bone:
    case ClassGroup::other: return {3, 1000.0};
    case ClassGroup::muscle: return {4, 1000.0};
    case ClassGroup::body_composition: return {5, 1000.0};
  }
  return {3, 1000.0};
}

class CatalogBuilder {
 public:
  void single(std::string name, ClassGroup g, bool single_component = false) {
    add(std::move(name), g, Chirality::none, std::nullopt, single_component);
  }
  // Adds "<stem>_left" then "<stem>_right" as mirrored partners.
  void pair(const std::string& stem, ClassGroup g, bool single_component = false) {
    const auto left = next_id_;
    add(stem + "_left", g, Chirality::left, left + 1, single_component);
    add(stem + "_right", g, Chirality::right, left, single_component);
  }
  void pair_right_first(const std::string& stem, ClassGroup g, bool single_component = false) {
    const auto right = next_id_;
    add(stem + "_right", g, Chirality::right, right + 1, single_component);
    add(stem + "_left", g, Chirality::left, right, single_component);
  }
  std::vector<ClassDef> take() { return std::move(classes_); }

 private:
  void add(std::string name, ClassGroup g, Chirality c, std::optional<std::int32_t> partner,
           bool single_component) {
    const auto d = defaults_for(g);
    classes_.push_back(ClassDef{next_id_++, std::move(name), g, c, partner, single_component,
                                d.min_volume_mm3, d.priority});
  }
  std::int32_t next_id_ = 1;
  std::vector<ClassDef> classes_;
};

constexpr std::array<const char*, 22> kLevels = {
    "C3", "C4", "C5", "C6", "C7", "T1", "T2",  "T3",  "T4", "T5", "T6",
    "T7", "T8", "T9", "T10", "T11", "T12", "L1", "L2", "L3", "L4", "L5"};

LabelSchema make_builtin() {
  using G = ClassGroup;
  CatalogBuilder b;
  b.single("spleen", G::organ, true);
  b.pair("kidney", G::organ, true);
  b.single("gallbladder", G::organ);
  b.single("liver", G::organ, true);
  b.single("stomach", G::digestion, true);
  b.single("pancreas", G::organ);
  b.pair("adrenal_gland", G::organ, true);
  b.pair("lung_upper_lobe", G::lung, true);
  b.pair("lung_lower_lobe", G::lung, true);
  // Only a right middle lobe exists, so it has no mirrored partner.
  b.single("lung_middle_lobe_right", G::lung, true);
  b.single("esophagus", G::digestion);
  b.single("trachea", G::lung, true);
  b.single("thyroid_gland", G::organ);
  b.single("intestine", G::digestion);
  b.single("duodenum", G::digestion);
  b.single("urinary_bladder", G::organ, true);
  b.single("prostate", G::organ, true);
  b.single("sacrum", G::bone, true);
  b.single("heart", G::organ, true);
  b.single("aorta", G::vessel);
  b.single("pulmonary_vein", G::vessel);
  b.single("brachiocephalic_trunk", G::vessel);
  b.pair("subclavian_artery", G::vessel);
  b.pair("common_carotid_artery", G::vessel);
  b.pair("brachiocephalic_vein", G::vessel);
  b.single("atrial_appendage_left", G::vessel);
  b.single("superior_vena_cava", G::vessel);
  b.single("inferior_vena_cava", G::vessel);
  b.single("portal_vein_and_splenic_vein", G::vessel);
  b.pair("iliac_artery", G::vessel);
  b.pair("iliac_vena", G::vessel);
  b.pair("humerus", G::bone, true);
  b.pair("scapula", G::bone, true);
  b.pair("clavicula", G::bone, true);
  b.pair("femur", G::bone, true);
  b.pair("hip", G::bone, true);
  b.single("spinal_cord", G::spine);
  b.pair("gluteus_maximus", G::muscle);
  b.pair("gluteus_medius", G::muscle);
  b.pair("gluteus_minimus", G::muscle);
  b.pair("autochthon", G::muscle);
  b.pair("iliopsoas", G::muscle);
  b.single("sternum", G::bone, true);
  b.single("costal_cartilages", G::bone);
  b.single("outer_skin", G::body_composition);
  b.single("muscle_other", G::body_composition);
  b.single("inner_fat", G::body_composition);
  b.single("intervertebral_disc", G::spine);
  b.single("vertebra_body", G::spine);
  b.single("vertebra_posterior_elements", G::spine);
  b.single("spinal_channel", G::spine);
  b.single("bone_other", G::bone);

  std::vector<InstanceClassDef> instances;
  for (std::size_t i = 0; i < kLevels.size(); ++i)
    instances.push_back({kFirstLevelId + static_cast<std::int32_t>(i), kLevels[i]});
  return LabelSchema("vibe-torso", "1", b.take(), std::move(instances));
}

LabelSchema make_total_ct() {
  using G = ClassGroup;
  CatalogBuilder b;
  b.single("spleen", G::organ);
  b.pair_right_first("kidney", G::organ);
  b.single("gallbladder", G::organ);
  b.single("liver", G::organ);
  b.single("stomach", G::digestion);
  b.single("pancreas", G::organ);
  b.pair_right_first("adrenal_gland", G::organ);
  b.single("lung_upper_lobe_left", G::lung);
  b.single("lung_lower_lobe_left", G::lung);
  b.single("lung_upper_lobe_right", G::lung);
  b.single("lung_middle_lobe_right", G::lung);
  b.single("lung_lower_lobe_right", G::lung);
  b.single("esophagus", G::digestion);
  b.single("trachea", G::lung);
  b.single("thyroid_gland", G::organ);
  b.single("small_bowel", G::digestion);
  b.single("duodenum", G::digestion);
  b.single("colon", G::digestion);
  b.single("urinary_bladder", G::organ);
  b.single("prostate", G::organ);
  b.pair("kidney_cyst", G::organ);
  b.single("sacrum", G::bone);
  b.single("vertebrae_S1", G::spine);
  for (const char* l : {"L5", "L4", "L3", "L2", "L1", "T12", "T11", "T10", "T9", "T8", "T7", "T6",
                        "T5", "T4", "T3", "T2", "T1", "C7", "C6", "C5", "C4", "C3", "C2", "C1"})
    b.single(std::string("vertebrae_") + l, G::spine);
  b.single("heart", G::organ);
  b.single("aorta", G::vessel);
  b.single("pulmonary_vein", G::vessel);
  b.single("brachiocephalic_trunk", G::vessel);
  b.pair_right_first("subclavian_artery", G::vessel);
  b.pair_right_first("common_carotid_artery", G::vessel);
  b.pair("brachiocephalic_vein", G::vessel);
  b.single("atrial_appendage_left", G::vessel);
  b.single("superior_vena_cava", G::vessel);
  b.single("inferior_vena_cava", G::vessel);
  b.single("portal_vein_and_splenic_vein", G::vessel);
  b.pair("iliac_artery", G::vessel);
  b.pair("iliac_vena", G::vessel);
  b.pair("humerus", G::bone);
  b.pair("scapula", G::bone);
  b.pair("clavicula", G::bone);
  b.pair("femur", G::bone);
  b.pair("hip", G::bone);
  b.single("spinal_cord", G::spine);
  b.pair("gluteus_maximus", G::muscle);
  b.pair("gluteus_medius", G::muscle);
  b.pair("gluteus_minimus", G::muscle);
  b.pair("autochthon", G::muscle);
  b.pair("iliopsoas", G::muscle);
  b.single("brain", G::other);
  b.single("skull", G::bone);
  for (int i = 1; i <= 12; ++i) b.single("rib_left_" + std::to_string(i), G::bone);
  for (int i = 1; i <= 12; ++i) b.single("rib_right_" + std::to_string(i), G::bone);
  b.single("sternum", G::bone);
  b.single("costal_cartilages", G::bone);
  return LabelSchema("total-ct", "2", b.take());
}

}  // namespace

const LabelSchema& builtin_schema() {
  static const LabelSchema schema = make_builtin();
  return schema;
}

const LabelSchema& total_ct_catalog() {
  static const LabelSchema schema = make_total_ct();
  return schema;
}

std::optional<std::int32_t> level_id(std::string_view level) {
  for (std::size_t i = 0; i < kLevels.size(); ++i)
    if (level == kLevels[i]) return kFirstLevelId + static_cast<std::int32_t>(i);
  return std::nullopt;
}

std::string level_name(std::int32_t id) {
  if (id < kFirstLevelId || id > kLastLevelId) return {};
  return kLevels[static_cast<std::size_t>(id - kFirstLevelId)];
}

}  // namespace torsoseg
