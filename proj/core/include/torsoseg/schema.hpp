#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

enum class ClassGroup { organ, muscle, vessel, bone, digestion, lung, spine, body_composition, other };
enum class Chirality { none, left, right };

std::string_view to_string(ClassGroup g);
std::string_view to_string(Chirality c);
ClassGroup parse_group(std::string_view s);
Chirality parse_chirality(std::string_view s);

struct ClassDef {
  std::int32_t id = 0;
  std::string name;
  ClassGroup group = ClassGroup::other;
  Chirality chirality = Chirality::none;
  std::optional<std::int32_t> partner_id;
  bool single_component = false;
  double min_component_volume_mm3 = 0.0;
  int merge_priority = 0;  // lower rank = higher priority

  bool operator==(const ClassDef&) const = default;
};

// One vertebra level. Ids follow anatomical numbering (C3=3 ... C7=7,
// T1=8 ... T12=19, L1=20 ... L5=24).
struct InstanceClassDef {
  std::int32_t id = 0;
  std::string level;

  bool operator==(const InstanceClassDef&) const = default;
};

// Immutable class catalog. Construction validates id uniqueness, symmetric
// left/right partnering and non-negative volume thresholds.
class LabelSchema {
 public:
  LabelSchema(std::string name, std::string version, std::vector<ClassDef> classes,
              std::vector<InstanceClassDef> instances = {});

  const std::string& name() const { return name_; }
  const std::string& version() const { return version_; }
  const std::vector<ClassDef>& classes() const { return classes_; }
  const std::vector<InstanceClassDef>& instances() const { return instances_; }

  const ClassDef* find(std::int32_t id) const;
  const ClassDef* find(std::string_view name) const;
  std::int32_t max_id() const;

  std::string to_json() const;
  static LabelSchema from_json(std::string_view text);

  bool operator==(const LabelSchema&) const = default;

 private:
  std::string name_;
  std::string version_;
  std::vector<ClassDef> classes_;
  std::vector<InstanceClassDef> instances_;
  std::map<std::int32_t, std::size_t> by_id_;
};

LabelSchema load_schema(const std::string& path);
void save_schema(const LabelSchema& schema, const std::string& path);

// The 71 semantic classes (ids 1..71 in catalog order, 0 = background) and
// the 22 vertebra levels C3..L5.
const LabelSchema& builtin_schema();

// The public CT catalog (117 classes) that initial masks come from.
const LabelSchema& total_ct_catalog();

// Vertebra level helpers.
std::optional<std::int32_t> level_id(std::string_view level);
std::string level_name(std::int32_t id);
inline constexpr std::int32_t kFirstLevelId = 3;   // C3
inline constexpr std::int32_t kLastLevelId = 24;   // L5

// Differences between two catalogs, one human-readable line per finding.
std::vector<std::string> diff_schemas(const LabelSchema& a, const LabelSchema& b);

struct MappingEntry {
  std::int32_t source_id;
  std::string source_name;
  std::int32_t target_id;
  std::string target_name;
};

struct DroppedEntry {
  std::int32_t source_id;
  std::string source_name;
  std::string reason;
};

struct MappingReport {
  std::vector<MappingEntry> mapped;
  std::vector<DroppedEntry> dropped;
  std::vector<std::string> warnings;
};

struct MappingResult {
  LabelMap labels;
  MappingReport report;
};

// Relabels a volume from a source catalog into `target` (defaults to the
// builtin catalog): colon and small bowel become intestine; ribs, brain,
// skull and kidney cysts are dropped; vertebra levels collapse to the vertebra
// body class; every other class maps by name. Unknown ids become 0.
MappingResult map_total_ct(const LabelMap& labels, const LabelSchema& source_catalog,
                           const LabelSchema& target = builtin_schema());

struct ClassVolume {
  std::int32_t id;
  std::string name;
  std::int64_t voxels;
  double volume_mm3;
};

struct LabelValidation {
  std::vector<std::pair<std::int32_t, std::int64_t>> unknown_ids;  // id, voxel count
  std::vector<ClassVolume> present;                                // schema classes with voxels
  std::vector<std::string> empty_groups;                           // groups with no voxels at all
};

LabelValidation validate_labels(const LabelMap& labels, const LabelSchema& schema);

enum class LateralityVerdict { swapped, indeterminate };

struct LateralityFinding {
  std::int32_t left_id;
  std::int32_t right_id;
  std::string left_name;
  std::string right_name;
  // Signed distance (mm) of each class centroid from the mid-sagittal plane;
  // negative values lie on the anatomical left.
  double left_offset_mm;
  double right_offset_mm;
  LateralityVerdict verdict;
};

// Flags left/right pairs whose centroids sit on the wrong side of the
// mid-sagittal plane through the foreground centroid.
std::vector<LateralityFinding> laterality_check(const LabelMap& labels, const LabelSchema& schema);

}  // namespace torsoseg
