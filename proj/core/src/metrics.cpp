#include "torsoseg/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "distance.hpp"
#include "torsoseg/parallel.hpp"
#include "torsoseg/stats.hpp"

namespace torsoseg {

std::string_view to_string(MetricStatus s) {
  switch (s) {
    case MetricStatus::ok: return "ok";
    case MetricStatus::ref_empty: return "ref_empty";
    case MetricStatus::pred_empty: return "pred_empty";
    case MetricStatus::both_empty: return "both_empty";
  }
  return "unknown";
}

namespace {

using Box = std::array<std::int64_t, 6>;  // xmin, ymin, zmin, xmax, ymax, zmax (inclusive)

Box empty_box() {
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  return {hi, hi, hi, lo, lo, lo};
}

void grow(Box& b, std::int64_t x, std::int64_t y, std::int64_t z) {
  b[0] = std::min(b[0], x), b[1] = std::min(b[1], y), b[2] = std::min(b[2], z);
  b[3] = std::max(b[3], x), b[4] = std::max(b[4], y), b[5] = std::max(b[5], z);
}

void merge_box(Box& into, const Box& other) {
  for (int a = 0; a < 3; ++a) {
    into[a] = std::min(into[a], other[a]);
    into[a + 3] = std::max(into[a + 3], other[a + 3]);
  }
}

// ASSD over the box `bbox` (covering all foreground of both masks) of a volume
// of shape `shape`. in_a / in_b test membership by full linear index.
template <typename InA, typename InB>
double assd_in_box(const Shape3& shape, const Box& bbox, const Vec3& spacing, InA in_a, InB in_b) {
  Box crop;
  for (int a = 0; a < 3; ++a) {
    crop[a] = std::max<std::int64_t>(0, bbox[a] - 1);
    crop[a + 3] = std::min<std::int64_t>(shape[a] - 1, bbox[a + 3] + 1);
  }
  const Shape3 cs = {crop[3] - crop[0] + 1, crop[4] - crop[1] + 1, crop[5] - crop[2] + 1};
  const auto n = static_cast<std::size_t>(cs[0] * cs[1] * cs[2]);
  std::vector<std::uint8_t> surf_a(n), surf_b(n);

  auto full = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return static_cast<std::size_t>(x + shape[0] * (y + shape[1] * z));
  };
  auto on_surface = [&](auto&& in, std::int64_t x, std::int64_t y, std::int64_t z) {
    if (!in(full(x, y, z))) return false;
    if (x == 0 || y == 0 || z == 0 || x == shape[0] - 1 || y == shape[1] - 1 || z == shape[2] - 1)
      return true;
    return !in(full(x - 1, y, z)) || !in(full(x + 1, y, z)) || !in(full(x, y - 1, z)) ||
           !in(full(x, y + 1, z)) || !in(full(x, y, z - 1)) || !in(full(x, y, z + 1));
  };
  std::size_t count_a = 0, count_b = 0;
  for (std::int64_t z = crop[2]; z <= crop[5]; ++z)
    for (std::int64_t y = crop[1]; y <= crop[4]; ++y)
      for (std::int64_t x = crop[0]; x <= crop[3]; ++x) {
        const auto i = static_cast<std::size_t>((x - crop[0]) + cs[0] * ((y - crop[1]) + cs[1] * (z - crop[2])));
        surf_a[i] = on_surface(in_a, x, y, z);
        surf_b[i] = on_surface(in_b, x, y, z);
        count_a += surf_a[i];
        count_b += surf_b[i];
      }

  double total = 0.0;
  {
    const auto to_b = detail::squared_distance_transform(surf_b, cs, spacing);
    for (std::size_t i = 0; i < n; ++i)
      if (surf_a[i]) total += std::sqrt(to_b[i]);
  }
  {
    const auto to_a = detail::squared_distance_transform(surf_a, cs, spacing);
    for (std::size_t i = 0; i < n; ++i)
      if (surf_b[i]) total += std::sqrt(to_a[i]);
  }
  return total / double(count_a + count_b);
}

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t state) : state_(state) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Unbiased draw from [0, n) (Lemire).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = next();
    auto m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        x = next();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

Aggregate aggregate(const std::vector<double>& v) {
  return {v.empty() ? 0.0 : mean(v), stddev(v), v.size()};
}

}  // namespace

std::optional<double> dice(const Mask& pred, const Mask& ref) {
  require_same_grid(pred.grid(), ref.grid(), "dice inputs");
  std::int64_t a = 0, b = 0, both = 0;
  const auto p = pred.data();
  const auto r = ref.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool x = p[i] != 0, y = r[i] != 0;
    a += x;
    b += y;
    both += x && y;
  }
  if (a + b == 0) return std::nullopt;
  return 2.0 * double(both) / double(a + b);
}

std::optional<double> assd(const Mask& pred, const Mask& ref) { return assd(pred, ref, pred.spacing()); }

std::optional<double> assd(const Mask& pred, const Mask& ref, const Vec3& spacing) {
  require_same_grid(pred.grid(), ref.grid(), "assd inputs");
  if (spacing.minCoeff() <= 0.0) throw ValidationError("assd spacing must be positive");
  Box box_a = empty_box(), box_b = empty_box();
  const auto& s = pred.shape();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        const auto i = pred.linear(x, y, z);
        if (pred[i]) grow(box_a, x, y, z);
        if (ref[i]) grow(box_b, x, y, z);
      }
  if (box_a[3] < box_a[0] || box_b[3] < box_b[0]) return std::nullopt;
  merge_box(box_a, box_b);
  const auto p = pred.data();
  const auto r = ref.data();
  return assd_in_box(s, box_a, spacing, [&](std::size_t i) { return p[i] != 0; },
                     [&](std::size_t i) { return r[i] != 0; });
}

std::vector<ClassMetrics> per_class_report(const LabelMap& pred, const LabelMap& ref,
                                           const LabelSchema& schema) {
  require_same_grid(pred.grid(), ref.grid(), "prediction and reference");
  const auto top = static_cast<std::size_t>(std::max(schema.max_id(), 0)) + 1;
  std::vector<std::int64_t> n_pred(top), n_ref(top), n_both(top);
  std::vector<Box> boxes(top, empty_box());
  const auto& s = pred.shape();
  for (std::int64_t z = 0; z < s[2]; ++z)
    for (std::int64_t y = 0; y < s[1]; ++y)
      for (std::int64_t x = 0; x < s[0]; ++x) {
        const auto i = pred.linear(x, y, z);
        const auto p = pred[i], r = ref[i];
        if (p > 0 && std::size_t(p) < top) {
          ++n_pred[p];
          grow(boxes[p], x, y, z);
        }
        if (r > 0 && std::size_t(r) < top) {
          ++n_ref[r];
          if (r != p) grow(boxes[r], x, y, z);
          else ++n_both[r];
        }
      }

  const double voxel = pred.grid().voxel_volume();
  const auto& classes = schema.classes();
  std::vector<ClassMetrics> out(classes.size());
  parallel_for(0, static_cast<std::int64_t>(classes.size()), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t k = lo; k < hi; ++k) {
      const auto& c = classes[k];
      const auto id = static_cast<std::size_t>(c.id);
      ClassMetrics m;
      m.class_id = c.id;
      m.name = c.name;
      m.pred_volume_mm3 = double(n_pred[id]) * voxel;
      m.ref_volume_mm3 = double(n_ref[id]) * voxel;
      const bool has_p = n_pred[id] > 0, has_r = n_ref[id] > 0;
      if (!has_p && !has_r) {
        m.status = MetricStatus::both_empty;
      } else if (!has_r) {
        m.status = MetricStatus::ref_empty;
        m.dice = 0.0;
      } else if (!has_p) {
        m.status = MetricStatus::pred_empty;
        m.dice = 0.0;
      } else {
        m.status = MetricStatus::ok;
        m.dice = 2.0 * double(n_both[id]) / double(n_pred[id] + n_ref[id]);
        const auto label = c.id;
        const auto pd = pred.data();
        const auto rd = ref.data();
        m.assd = assd_in_box(s, boxes[id], pred.spacing(),
                             [&](std::size_t i) { return pd[i] == label; },
                             [&](std::size_t i) { return rd[i] == label; });
      }
      out[k] = std::move(m);
    }
  });
  return out;
}

BootstrapCI bootstrap_ci(std::span<const double> values, std::int64_t iterations, double level,
                         std::uint64_t seed) {
  if (values.empty()) throw ValidationError("bootstrap needs at least one value");
  if (iterations < 1) throw ValidationError("bootstrap needs at least one iteration");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("bootstrap level must lie in (0, 1)");
  for (const double v : values)
    if (!std::isfinite(v)) throw ValidationError("bootstrap values must be finite");

  const auto n = static_cast<std::uint64_t>(values.size());
  const std::uint64_t key = mix(seed);
  // Sums run over deviations from the first value, so constant data yields it exactly.
  const double anchor = values[0];
  std::vector<double> means(static_cast<std::size_t>(iterations));
  parallel_for(0, iterations, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t it = lo; it < hi; ++it) {
      SplitMix rng(mix(key ^ mix(static_cast<std::uint64_t>(it))));
      double sum = 0.0;
      for (std::uint64_t j = 0; j < n; ++j) sum += values[rng.below(n)] - anchor;
      means[static_cast<std::size_t>(it)] = anchor + sum / double(n);
    }
  });

  BootstrapCI ci;
  double deviation = 0.0;
  for (const double v : values) deviation += v - anchor;
  ci.mean = anchor + deviation / double(n);
  ci.lo = percentile(means, 50.0 * (1.0 - level));
  ci.hi = percentile(std::move(means), 50.0 * (1.0 + level));
  ci.lo = std::min(ci.lo, ci.mean);
  ci.hi = std::max(ci.hi, ci.mean);
  ci.iterations = iterations;
  ci.level = level;
  ci.seed = seed;
  return ci;
}

EvaluationReport summarize(std::vector<SubjectMetrics> subjects, const BootstrapParams& params) {
  EvaluationReport r;
  std::vector<double> pooled_dice, pooled_assd, subject_macro;
  std::map<std::int32_t, std::vector<double>> by_class;
  for (const auto& s : subjects) {
    std::vector<double> mine;
    for (const auto& c : s.classes) {
      if (c.dice) {
        pooled_dice.push_back(*c.dice);
        mine.push_back(*c.dice);
        by_class[c.class_id].push_back(*c.dice);
      }
      if (c.assd) pooled_assd.push_back(*c.assd);
    }
    if (!mine.empty()) subject_macro.push_back(mean(mine));
  }
  std::vector<double> class_means;
  for (const auto& [id, v] : by_class) class_means.push_back(mean(v));
  r.dice_over_classes = aggregate(pooled_dice);
  r.assd_over_classes = aggregate(pooled_assd);
  r.dice_subject_then_class = aggregate(class_means);

  const bool over_subjects = subjects.size() >= 2;
  const auto& sample = over_subjects ? subject_macro : pooled_dice;
  r.ci_unit = over_subjects ? "subject" : "class";
  if (!sample.empty()) r.dice_ci = bootstrap_ci(sample, params.iterations, params.level, params.seed);
  r.subjects = std::move(subjects);
  return r;
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json aggregate_json(const Aggregate& a) {
  return {{"mean", a.mean}, {"sd", a.sd}, {"count", a.count}};
}

std::string number(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(10) << *v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  auto& subjects = j["subjects"] = nlohmann::ordered_json::array();
  for (const auto& s : report.subjects) {
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& c : s.classes)
      classes.push_back({{"class_id", c.class_id},
                         {"name", c.name},
                         {"dice", optional_json(c.dice)},
                         {"assd_mm", optional_json(c.assd)},
                         {"pred_volume_mm3", c.pred_volume_mm3},
                         {"ref_volume_mm3", c.ref_volume_mm3},
                         {"status", to_string(c.status)}});
    subjects.push_back({{"subject", s.subject}, {"classes", std::move(classes)}});
  }
  auto& summary = j["summary"];
  summary["macro_dice"] = report.dice_over_classes.mean;
  summary["dice_over_classes"] = aggregate_json(report.dice_over_classes);
  summary["dice_subject_then_class"] = aggregate_json(report.dice_subject_then_class);
  summary["assd_over_classes"] = aggregate_json(report.assd_over_classes);
  if (report.dice_ci) {
    const auto& ci = *report.dice_ci;
    summary["dice_bootstrap"] = {{"method", "percentile"}, {"unit", report.ci_unit},
                                 {"mean", ci.mean},        {"lo", ci.lo},
                                 {"hi", ci.hi},            {"iterations", ci.iterations},
                                 {"level", ci.level},      {"seed", ci.seed}};
  } else {
    summary["dice_bootstrap"] = nullptr;
  }
  return j.dump(2);
}

std::string report_csv(const EvaluationReport& report) {
  const bool many = report.subjects.size() > 1;
  std::ostringstream os;
  if (many) os << "subject,";
  os << "class_id,name,dice,assd_mm,status\n";
  for (const auto& s : report.subjects)
    for (const auto& c : s.classes) {
      if (many) os << csv_field(s.subject) << ',';
      os << c.class_id << ',' << csv_field(c.name) << ',' << number(c.dice) << ','
         << number(c.assd) << ',' << to_string(c.status) << '\n';
    }
  std::ostringstream status;
  status << "sd=" << number(report.dice_over_classes.sd) << ";n=" << report.dice_over_classes.count;
  if (report.dice_ci)
    status << ";ci" << number(report.dice_ci->level) << "=[" << number(report.dice_ci->lo) << " "
           << number(report.dice_ci->hi) << "]";
  if (many) os << "all,";
  os << "summary,macro_mean," << number(report.dice_over_classes.mean) << ','
     << number(report.assd_over_classes.mean) << ',' << status.str() << '\n';
  return os.str();
}

}  // namespace torsoseg
