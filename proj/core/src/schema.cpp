#include "torsoseg/schema.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace torsoseg {

namespace {

constexpr std::array<std::pair<ClassGroup, std::string_view>, 9> kGroups = {{
    {ClassGroup::organ, "organ"},
    {ClassGroup::muscle, "muscle"},
    {ClassGroup::vessel, "vessel"},
    {ClassGroup::bone, "bone"},
    {ClassGroup::digestion, "digestion"},
    {ClassGroup::lung, "lung"},
    {ClassGroup::spine, "spine"},
    {ClassGroup::body_composition, "body-composition"},
    {ClassGroup::other, "other"},
}};

}  // namespace

std::string_view to_string(ClassGroup g) {
  for (const auto& [k, v] : kGroups)
    if (k == g) return v;
  return "other";
}

std::string_view to_string(Chirality c) {
  switch (c) {
    case Chirality::left: return "left";
    case Chirality::right: return "right";
    case Chirality::none: break;
  }
  return "none";
}

ClassGroup parse_group(std::string_view s) {
  for (const auto& [k, v] : kGroups)
    if (v == s) return k;
  throw ValidationError("unknown class group '" + std::string(s) + "'");
}

Chirality parse_chirality(std::string_view s) {
  if (s == "none") return Chirality::none;
  if (s == "left") return Chirality::left;
  if (s == "right") return Chirality::right;
  throw ValidationError("unknown chirality '" + std::string(s) + "'");
}

LabelSchema::LabelSchema(std::string name, std::string version, std::vector<ClassDef> classes,
                         std::vector<InstanceClassDef> instances)
    : name_(std::move(name)),
      version_(std::move(version)),
      classes_(std::move(classes)),
      instances_(std::move(instances)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.id <= 0) throw ValidationError("class ids must be positive (class '" + c.name + "')");
    if (!by_id_.emplace(c.id, i).second)
      throw ValidationError("duplicate class id " + std::to_string(c.id));
    if (!names.insert(c.name).second) throw ValidationError("duplicate class name '" + c.name + "'");
    if (!(c.min_component_volume_mm3 >= 0))
      throw ValidationError("min_component_volume must be >= 0 for '" + c.name + "'");
  }
  for (const auto& c : classes_) {
    if (c.chirality == Chirality::none) {
      if (c.partner_id) throw ValidationError("class '" + c.name + "' has a partner but no chirality");
      continue;
    }
    if (!c.partner_id) throw ValidationError("lateral class '" + c.name + "' has no partner");
    const ClassDef* p = find(*c.partner_id);
    if (!p) throw ValidationError("class '" + c.name + "' names a missing partner");
    const Chirality mirrored = c.chirality == Chirality::left ? Chirality::right : Chirality::left;
    if (p->chirality != mirrored || p->partner_id != c.id)
      throw ValidationError("asymmetric left/right partnering for '" + c.name + "'");
  }
  for (std::size_t i = 1; i < instances_.size(); ++i)
    if (instances_[i].id <= instances_[i - 1].id)
      throw ValidationError("instance levels must be strictly ordered superior to inferior");
}

const ClassDef* LabelSchema::find(std::int32_t id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &classes_[it->second];
}

const ClassDef* LabelSchema::find(std::string_view name) const {
  for (const auto& c : classes_)
    if (c.name == name) return &c;
  return nullptr;
}

std::int32_t LabelSchema::max_id() const { return by_id_.empty() ? 0 : by_id_.rbegin()->first; }

std::string LabelSchema::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name_;
  j["version"] = version_;
  auto& cls = j["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : classes_) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["name"] = c.name;
    e["group"] = to_string(c.group);
    e["chirality"] = to_string(c.chirality);
    e["partner"] = c.partner_id ? nlohmann::ordered_json(*c.partner_id) : nlohmann::ordered_json(nullptr);
    e["single_component"] = c.single_component;
    e["min_volume_mm3"] = c.min_component_volume_mm3;
    e["priority"] = c.merge_priority;
    cls.push_back(std::move(e));
  }
  auto& inst = j["instances"] = nlohmann::ordered_json::array();
  for (const auto& i : instances_) inst.push_back({{"id", i.id}, {"level", i.level}});
  return j.dump(2) + "\n";
}

LabelSchema LabelSchema::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("catalog is not valid JSON: ") + e.what());
  }
  try {
    std::vector<ClassDef> classes;
    for (const auto& e : j.at("classes")) {
      ClassDef c;
      c.id = e.at("id").get<std::int32_t>();
      c.name = e.at("name").get<std::string>();
      c.group = parse_group(e.value("group", std::string("other")));
      c.chirality = parse_chirality(e.value("chirality", std::string("none")));
      if (e.contains("partner") && !e["partner"].is_null()) c.partner_id = e["partner"].get<std::int32_t>();
      c.single_component = e.value("single_component", false);
      c.min_component_volume_mm3 = e.value("min_volume_mm3", 0.0);
      c.merge_priority = e.value("priority", 0);
      classes.push_back(std::move(c));
    }
    std::vector<InstanceClassDef> instances;
    if (j.contains("instances"))
      for (const auto& e : j["instances"])
        instances.push_back({e.at("id").get<std::int32_t>(), e.at("level").get<std::string>()});
    return LabelSchema(j.value("name", std::string("custom")), j.value("version", std::string("0")),
                       std::move(classes), std::move(instances));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed catalog: ") + e.what());
  }
}

LabelSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read catalog " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return LabelSchema::from_json(ss.str());
}

void save_schema(const LabelSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write catalog " + path);
  out << schema.to_json();
  if (!out) throw IoError("failed writing catalog " + path);
}

std::vector<std::string> diff_schemas(const LabelSchema& a, const LabelSchema& b) {
  std::vector<std::string> out;
  if (a.version() != b.version()) out.push_back("version: " + a.version() + " -> " + b.version());
  auto field = [&](const ClassDef& x, const ClassDef& y, const char* what, auto get) {
    if (get(x) != get(y)) {
      std::ostringstream os;
      os << "class " << x.id << " (" << x.name << "): " << what << " " << get(x) << " -> " << get(y);
      out.push_back(os.str());
    }
  };
  for (const auto& x : a.classes()) {
    const ClassDef* y = b.find(x.id);
    if (!y) {
      out.push_back("class " + std::to_string(x.id) + " (" + x.name + ") removed");
      continue;
    }
    field(x, *y, "name", [](const ClassDef& c) { return c.name; });
    field(x, *y, "group", [](const ClassDef& c) { return std::string(to_string(c.group)); });
    field(x, *y, "chirality", [](const ClassDef& c) { return std::string(to_string(c.chirality)); });
    field(x, *y, "partner", [](const ClassDef& c) { return c.partner_id ? *c.partner_id : 0; });
    field(x, *y, "single_component", [](const ClassDef& c) { return c.single_component; });
    field(x, *y, "min_volume_mm3", [](const ClassDef& c) { return c.min_component_volume_mm3; });
    field(x, *y, "priority", [](const ClassDef& c) { return c.merge_priority; });
  }
  for (const auto& y : b.classes())
    if (!a.find(y.id)) out.push_back("class " + std::to_string(y.id) + " (" + y.name + ") added");
  if (a.instances() != b.instances()) out.push_back("instance levels differ");
  return out;
}

namespace {

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

struct Rule {
  std::optional<std::string> target;  // target class name when mapped
  std::string drop_reason;            // when dropped
  bool vertebra = false;
};

Rule rule_for(const std::string& name, const LabelSchema& target) {
  if (name == "small_bowel" || name == "colon") return {"intestine", {}, false};
  if (starts_with(name, "kidney_cyst")) return {std::nullopt, "Missing; Out of scope for this work", false};
  if (name == "brain" || name == "skull") return {std::nullopt, "Missing; Outside FOV", false};
  if (starts_with(name, "rib_")) return {std::nullopt, "Missing; Not reproduced due to time constrains", false};
  if (starts_with(name, "vertebrae_")) return {"vertebra_body", {}, true};
  if (target.find(name)) return {name, {}, false};
  return {std::nullopt, "no class named '" + name + "' in target catalog", false};
}

}  // namespace

MappingResult map_total_ct(const LabelMap& labels, const LabelSchema& source_catalog,
                           const LabelSchema& target) {
  std::int32_t max_label = 0;
  for (const auto v : labels.data()) max_label = std::max(max_label, v);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
  for (const auto v : labels.data()) ++counts[static_cast<std::size_t>(v)];

  std::vector<std::int32_t> lut(counts.size(), 0);
  MappingReport report;
  bool warned_vertebra = false;
  for (std::int32_t id = 1; id <= max_label; ++id) {
    if (counts[static_cast<std::size_t>(id)] == 0) continue;
    const ClassDef* src = source_catalog.find(id);
    if (!src) {
      report.dropped.push_back({id, "", "unknown id in source catalog"});
      report.warnings.push_back("label " + std::to_string(id) + " is not in catalog '" +
                                source_catalog.name() + "'; set to 0");
      continue;
    }
    const Rule r = rule_for(src->name, target);
    const ClassDef* dst = r.target ? target.find(*r.target) : nullptr;
    if (!dst) {
      report.dropped.push_back({id, src->name, r.target ? "target catalog lacks '" + *r.target + "'" : r.drop_reason});
      continue;
    }
    lut[static_cast<std::size_t>(id)] = dst->id;
    report.mapped.push_back({id, src->name, dst->id, dst->name});
    if (r.vertebra && !warned_vertebra) {
      report.warnings.push_back(
          "per-level vertebrae collapsed into '" + dst->name +
          "'; the body / posterior-element split cannot be derived by relabeling");
      warned_vertebra = true;
    }
  }

  LabelMap out(labels.grid());
  auto dst = out.data();
  const auto src = labels.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[static_cast<std::size_t>(src[i])];
  return {std::move(out), std::move(report)};
}

LabelValidation validate_labels(const LabelMap& labels, const LabelSchema& schema) {
  std::int32_t max_label = 0;
  for (const auto v : labels.data()) max_label = std::max(max_label, v);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
  for (const auto v : labels.data()) ++counts[static_cast<std::size_t>(v)];

  LabelValidation out;
  const double voxel = labels.grid().voxel_volume();
  std::set<ClassGroup> seen_groups;
  for (std::int32_t id = 1; id <= max_label; ++id) {
    const auto n = counts[static_cast<std::size_t>(id)];
    if (n == 0) continue;
    if (const ClassDef* c = schema.find(id)) {
      out.present.push_back({id, c->name, n, static_cast<double>(n) * voxel});
      seen_groups.insert(c->group);
    } else {
      out.unknown_ids.emplace_back(id, n);
    }
  }
  std::set<ClassGroup> schema_groups;
  for (const auto& c : schema.classes()) schema_groups.insert(c.group);
  for (const auto g : schema_groups)
    if (!seen_groups.count(g)) out.empty_groups.emplace_back(to_string(g));
  return out;
}

std::vector<LateralityFinding> laterality_check(const LabelMap& labels, const LabelSchema& schema) {
  std::int32_t max_label = 0;
  for (const auto v : labels.data()) max_label = std::max(max_label, v);
  const std::size_t n = static_cast<std::size_t>(max_label) + 1;
  std::vector<std::int64_t> count(n, 0);
  std::vector<Vec3> sum(n, Vec3::Zero());
  const auto& s = labels.shape();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        const auto label = labels(x, y, z);
        if (label <= 0) continue;
        const auto v = static_cast<std::size_t>(label);
        ++count[v];
        sum[v] += Vec3(double(x), double(y), double(z));
      }
  std::int64_t total = 0;
  Vec3 total_sum = Vec3::Zero();
  for (std::size_t v = 1; v < n; ++v) {
    total += count[v];
    total_sum += sum[v];
  }
  if (total == 0) throw ValidationError("laterality check needs a nonempty foreground");

  const auto& grid = labels.grid();
  const double plane_x = grid.to_world(total_sum / double(total))[0];
  const double tolerance = grid.spacing()[grid.lateral_axis()];
  auto offset = [&](std::int32_t id) {
    const auto k = static_cast<std::size_t>(id);
    return grid.to_world(sum[k] / double(count[k]))[0] - plane_x;
  };
  auto present = [&](std::int32_t id) {
    return id > 0 && static_cast<std::size_t>(id) < n && count[static_cast<std::size_t>(id)] > 0;
  };

  std::vector<LateralityFinding> findings;
  for (const auto& c : schema.classes()) {
    if (c.chirality != Chirality::left || !c.partner_id) continue;
    const std::int32_t right = *c.partner_id;
    if (!present(c.id) || !present(right)) continue;
    const double lo = offset(c.id);
    const double ro = offset(right);
    // World +x points to the subject's right.
    const bool misplaced = lo > 0 || ro < 0;
    const bool near_plane = std::abs(lo) < tolerance || std::abs(ro) < tolerance;
    if (!misplaced && !near_plane) continue;
    findings.push_back({c.id, right, c.name, schema.find(right)->name, lo, ro,
                        near_plane ? LateralityVerdict::indeterminate : LateralityVerdict::swapped});
  }
  return findings;
}

}  // namespace torsoseg
