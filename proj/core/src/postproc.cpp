#include "torsoseg/postproc.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace torsoseg {

FilterOutcome filter_small_components_detailed(const LabelMap& labels, const LabelSchema& schema,
                                               Connectivity connectivity) {
  ComponentLabeling cc = label_components(labels, connectivity);
  std::vector<bool> kept(cc.stats.size(), true);
  // Stats are grouped by class and already in size order within a class.
  std::int32_t current_class = -1;
  bool first_of_class = true;
  for (std::size_t k = 0; k < cc.stats.size(); ++k) {
    const auto& c = cc.stats[k];
    if (c.class_id != current_class) {
      current_class = c.class_id;
      first_of_class = true;
    }
    const ClassDef* def = schema.find(c.class_id);
    if (!def) continue;
    if (c.volume_mm3 < def->min_component_volume_mm3) kept[k] = false;
    if (def->single_component && !first_of_class) kept[k] = false;
    first_of_class = false;
  }

  LabelMap out(labels.grid());
  const auto comp = cc.components.data();
  const auto src = labels.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto id = comp[i];
    dst[i] = (id != 0 && kept[static_cast<std::size_t>(id - 1)]) ? src[i] : 0;
  }
  return {std::move(out), std::move(cc.stats), std::move(kept)};
}

LabelMap filter_small_components(const LabelMap& labels, const LabelSchema& schema,
                                 Connectivity connectivity) {
  return filter_small_components_detailed(labels, schema, connectivity).labels;
}

namespace {

// Rank key: (priority, class id); unknown classes sort last.
std::pair<std::int64_t, std::int32_t> rank_of(std::int32_t id, const LabelSchema& schema) {
  const ClassDef* c = schema.find(id);
  const std::int64_t p = c ? c->merge_priority : std::numeric_limits<std::int64_t>::max();
  return {p, id};
}

}  // namespace

LabelMap merge_with_priority(std::span<const ClassMask> masks, const LabelSchema& schema) {
  if (masks.empty()) throw ValidationError("merge needs at least one mask");
  std::set<std::int32_t> ids;
  for (const auto& m : masks) {
    if (m.class_id <= 0) throw ValidationError("merge class ids must be positive");
    if (!ids.insert(m.class_id).second)
      throw ValidationError("duplicate class id " + std::to_string(m.class_id) + " in merge input");
    require_same_grid(masks.front().mask->grid(), m.mask->grid(), "merge inputs");
  }
  std::vector<const ClassMask*> order;
  for (const auto& m : masks) order.push_back(&m);
  std::sort(order.begin(), order.end(), [&](const ClassMask* a, const ClassMask* b) {
    return rank_of(a->class_id, schema) < rank_of(b->class_id, schema);
  });

  LabelMap out(masks.front().mask->grid());
  auto dst = out.data();
  for (const ClassMask* m : order) {
    const auto src = m->mask->data();
    for (std::size_t i = 0; i < src.size(); ++i)
      if (src[i] && dst[i] == 0) dst[i] = m->class_id;
  }
  return out;
}

LabelMap merge_labelmaps(std::span<const LabelMap> sources, const LabelSchema& schema) {
  if (sources.empty()) throw ValidationError("merge needs at least one labelmap");
  for (const auto& s : sources) require_same_grid(sources.front().grid(), s.grid(), "merge inputs");

  std::int32_t max_label = 0;
  for (const auto& s : sources)
    for (const auto v : s.data()) max_label = std::max(max_label, v);
  // Dense rank per label id so the voxel loop is table lookups only.
  std::vector<std::int32_t> ids;
  for (std::int32_t id = 1; id <= max_label; ++id) ids.push_back(id);
  std::sort(ids.begin(), ids.end(),
            [&](std::int32_t a, std::int32_t b) { return rank_of(a, schema) < rank_of(b, schema); });
  std::vector<std::int32_t> rank(static_cast<std::size_t>(max_label) + 1,
                                 std::numeric_limits<std::int32_t>::max());
  for (std::size_t r = 0; r < ids.size(); ++r) rank[static_cast<std::size_t>(ids[r])] = static_cast<std::int32_t>(r);

  LabelMap out(sources.front().grid());
  auto dst = out.data();
  for (const auto& s : sources) {
    const auto src = s.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto v = src[i];
      if (v == 0) continue;
      const auto cur = dst[i];
      if (cur == 0 || rank[static_cast<std::size_t>(v)] < rank[static_cast<std::size_t>(cur)]) dst[i] = v;
    }
  }
  return out;
}

}  // namespace torsoseg
