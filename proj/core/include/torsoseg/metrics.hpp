#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "torsoseg/schema.hpp"
#include "torsoseg/volume.hpp"

namespace torsoseg {

// 2|A∩B| / (|A|+|B|). Undefined when both masks are empty; 0 when exactly one is.
std::optional<double> dice(const Mask& pred, const Mask& ref);

// Average symmetric surface distance in mm. Surface voxels are foreground
// voxels with a 6-connected background neighbour; the volume border counts as
// background. Sum of nearest-surface distances in both directions divided by
// the total surface voxel count. Undefined when either mask is empty.
std::optional<double> assd(const Mask& pred, const Mask& ref);
// Same, with an explicit spacing in place of the grid's.
std::optional<double> assd(const Mask& pred, const Mask& ref, const Vec3& spacing);

enum class MetricStatus { ok, ref_empty, pred_empty, both_empty };
std::string_view to_string(MetricStatus s);

struct ClassMetrics {
  std::int32_t class_id = 0;
  std::string name;
  std::optional<double> dice;  // empty iff status == both_empty
  std::optional<double> assd;  // empty iff either volume is 0
  double pred_volume_mm3 = 0.0;
  double ref_volume_mm3 = 0.0;
  MetricStatus status = MetricStatus::both_empty;
};

// One entry per schema class, in schema order.
std::vector<ClassMetrics> per_class_report(const LabelMap& pred, const LabelMap& ref,
                                           const LabelSchema& schema);

struct BootstrapCI {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t iterations = 0;
  double level = 0.95;
  std::uint64_t seed = 0;
};

// Percentile bootstrap of the mean. Iteration i draws from a generator keyed
// on (seed, i), so results do not depend on the worker count.
BootstrapCI bootstrap_ci(std::span<const double> values, std::int64_t iterations = 10000,
                         double level = 0.95, std::uint64_t seed = 0);

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

struct SubjectMetrics {
  std::string subject;
  std::vector<ClassMetrics> classes;
};

struct EvaluationReport {
  std::vector<SubjectMetrics> subjects;
  // Every defined (subject, class) value pooled.
  Aggregate dice_over_classes;
  Aggregate assd_over_classes;
  // Per-class mean over subjects, then mean and SD over classes.
  Aggregate dice_subject_then_class;
  // Over per-subject macro Dice with two or more subjects, else over classes.
  std::optional<BootstrapCI> dice_ci;
  std::string ci_unit;  // "subject" or "class"
};

struct BootstrapParams {
  std::int64_t iterations = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

EvaluationReport summarize(std::vector<SubjectMetrics> subjects, const BootstrapParams& params = {});

// JSON body (classes, summaries, bootstrap) without run metadata.
std::string report_json(const EvaluationReport& report);
// Columns class_id,name,dice,assd_mm,status (subject first with several
// subjects), then summary rows.
std::string report_csv(const EvaluationReport& report);

}  // namespace torsoseg
