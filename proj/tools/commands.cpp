#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "report.hpp"
#include "torsoseg/metrics.hpp"
#include "torsoseg/nifti.hpp"
#include "torsoseg/postproc.hpp"
#include "torsoseg/pseudoct.hpp"
#include "torsoseg/quadrants.hpp"
#include "torsoseg/resample.hpp"
#include "torsoseg/schema.hpp"
#include "torsoseg/stitch.hpp"
#include "torsoseg/tiler.hpp"
#include "torsoseg/vertebrae.hpp"

namespace torsoseg::cli {

namespace {

LabelSchema load_catalog(const std::string& path) {
  if (path.empty() || path == "builtin:vibe") return builtin_schema();
  if (path == "builtin:total-ct") return total_ct_catalog();
  return load_schema(path);
}

Json shape_json(const GridSpec& g) {
  return {{"shape", {g.shape()[0], g.shape()[1], g.shape()[2]}},
          {"spacing_mm", {g.spacing()[0], g.spacing()[1], g.spacing()[2]}},
          {"orientation", g.orientation()}};
}

void write_any(const AnyVolume& v, const std::string& path) { write_volume(v, path); }

}  // namespace

Command add_stitch(CLI::App& app, const Globals&) {
  struct Opts {
    std::vector<std::string> stacks;
    std::string out, report;
    std::vector<double> spacing;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("stitch", "Fuse overlapping acquisition stacks into one volume");
  sub->add_option("stacks", o->stacks, "Stack files (images or labelmaps, not mixed)")->required();
  sub->add_option("--out,-o", o->out, "Output NIfTI")->required();
  sub->add_option("--spacing", o->spacing, "Output spacing x,y,z in mm (default: finest per axis)")
      ->delimiter(',')
      ->expected(3);
  sub->add_option("--report", o->report, "JSON report path");
  return {sub, [o, sub] {
            std::vector<Image> images;
            std::vector<LabelMap> labels;
            std::vector<std::string> warnings;
            for (const auto& path : o->stacks) {
              auto loaded = read_volume(path);
              for (auto& w : loaded.warnings) warnings.push_back(path + ": " + w);
              if (auto* img = std::get_if<Image>(&loaded.volume)) images.push_back(std::move(*img));
              else labels.push_back(std::get<LabelMap>(std::move(loaded.volume)));
            }
            if (!images.empty() && !labels.empty())
              throw ValidationError("stitch inputs mix images and labelmaps");
            std::optional<Vec3> spacing;
            if (!o->spacing.empty()) spacing = Vec3(o->spacing[0], o->spacing[1], o->spacing[2]);
            GridSpec grid;
            if (!images.empty()) {
              auto r = stitch_images(images, spacing);
              warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
              write_volume(r.volume, o->out);
              grid = r.volume.grid();
            } else {
              auto r = stitch_labels(labels, spacing);
              warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
              write_volume(r.volume, o->out);
              grid = r.volume.grid();
            }
            warn_all(warnings);
            if (!o->report.empty()) {
              auto j = report_header(*sub, nullptr);
              j["output"] = shape_json(grid);
              j["stacks"] = o->stacks.size();
              j["warnings"] = warnings;
              write_json(o->report, j);
            }
          }};
}

Command add_pseudoct(CLI::App& app, const Globals&) {
  struct Opts {
    std::string water, inphase, muscle, bglung, out, bglung_out, report;
    BackgroundLungParams params;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("pseudoct", "Shift water-image intensities towards CT appearance");
  sub->add_option("--water", o->water, "Water image")->required();
  auto* ip = sub->add_option("--inphase", o->inphase, "In-phase image used to find background and lung");
  auto* bg = sub->add_option("--bglung", o->bglung, "Precomputed background/lung map (nonzero = shift)");
  ip->excludes(bg);
  sub->add_option("--muscle", o->muscle, "Muscle labelmap (nonzero = muscle)")->required();
  sub->add_option("--out,-o", o->out, "Output image")->required();
  sub->add_option("--threshold-fraction", o->params.threshold_fraction,
                  "Background threshold as a fraction of the 99th percentile")
      ->capture_default_str();
  sub->add_option("--min-lung-volume", o->params.min_lung_volume_mm3,
                  "Smallest interior low-signal component treated as lung (mm^3)")
      ->capture_default_str();
  sub->add_option("--bglung-out", o->bglung_out, "Write the background/lung map");
  sub->add_option("--report", o->report, "JSON report path");
  return {sub, [o, sub] {
            if (o->inphase.empty() && o->bglung.empty())
              throw ValidationError("pseudoct needs --inphase or --bglung");
            const Image water = read_image(o->water);
            const LabelMap muscle = read_labels(o->muscle);
            const LabelMap bglung = o->bglung.empty()
                                        ? find_background_and_lung(read_image(o->inphase), o->params)
                                        : read_labels(o->bglung);
            auto r = make_pseudo_ct(water, muscle, bglung);
            warn_all(r.warnings);
            write_volume(r.image, o->out);
            if (!o->bglung_out.empty()) write_volume(bglung, o->bglung_out);
            if (!o->report.empty()) {
              auto j = report_header(*sub, nullptr);
              j["output"] = shape_json(r.image.grid());
              j["muscle_voxels"] = count_nonzero(muscle);
              std::int64_t background = 0, lung = 0;
              for (const auto v : bglung.data()) {
                background += v == kBackgroundLabel;
                lung += v == kLungLabel;
              }
              j["background_voxels"] = background;
              j["lung_voxels"] = lung;
              j["warnings"] = r.warnings;
              write_json(o->report, j);
            }
          }};
}

Command add_postproc(CLI::App& app, const Globals&) {
  struct Opts {
    std::vector<std::string> labels;
    std::string schema, out, stats_csv, report;
    int connectivity = 26;
    bool skip_filter = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("postproc",
                                 "Remove small components, keep single-component classes whole, merge sources");
  sub->add_option("--labels", o->labels, "Input labelmap; repeat to merge several sources")->required();
  sub->add_option("--schema", o->schema, "Catalog JSON (default: builtin)");
  sub->add_option("--out,-o", o->out, "Output labelmap")->required();
  sub->add_option("--connectivity", o->connectivity, "6, 18 or 26")->capture_default_str();
  sub->add_flag("--skip-filter", o->skip_filter, "Only merge");
  sub->add_option("--stats-csv", o->stats_csv, "Per-component statistics");
  sub->add_option("--report", o->report, "JSON report path");
  return {sub, [o, sub] {
            const auto schema = load_catalog(o->schema);
            const auto conn = parse_connectivity(o->connectivity);
            std::vector<LabelMap> filtered;
            std::ostringstream csv;
            csv << "source,component_id,class_id,name,voxels,volume_mm3,centroid_x,centroid_y,centroid_z,kept\n";
            std::int64_t removed = 0, total = 0;
            for (std::size_t s = 0; s < o->labels.size(); ++s) {
              LabelMap in = read_labels(o->labels[s]);
              if (o->skip_filter) {
                filtered.push_back(std::move(in));
                continue;
              }
              auto r = filter_small_components_detailed(in, schema, conn);
              for (std::size_t k = 0; k < r.components.size(); ++k) {
                const auto& c = r.components[k];
                const auto* def = schema.find(c.class_id);
                csv << s << ',' << c.component_id << ',' << c.class_id << ',' << (def ? def->name : "") << ','
                    << c.voxel_count << ',' << c.volume_mm3 << ',' << c.centroid_mm[0] << ','
                    << c.centroid_mm[1] << ',' << c.centroid_mm[2] << ',' << (r.kept[k] ? 1 : 0) << '\n';
                ++total;
                removed += r.kept[k] ? 0 : 1;
              }
              filtered.push_back(std::move(r.labels));
            }
            LabelMap out = filtered.size() == 1 ? std::move(filtered.front()) : merge_labelmaps(filtered, schema);
            write_volume(out, o->out);
            if (!o->stats_csv.empty()) write_text(o->stats_csv, csv.str());
            if (!o->report.empty()) {
              auto j = report_header(*sub, &schema);
              j["sources"] = o->labels;
              j["components"] = total;
              j["components_removed"] = removed;
              j["output"] = shape_json(out.grid());
              write_json(o->report, j);
            }
          }};
}

Command add_quadrants(CLI::App& app, const Globals&) {
  struct Opts {
    std::string inphase, out, body_out, report;
    int bands = kDefaultBands;
    double threshold_fraction = 0.1;
    bool native = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("quadrants", "Coarse body-region localizer on a 96^3 grid at 4 mm");
  sub->add_option("--inphase", o->inphase, "In-phase image")->required();
  sub->add_option("--out,-o", o->out, "Output quadrant labelmap")->required();
  sub->add_option("--bands", o->bands, "Axial bands; band 0 stays whole, the rest split left/right")
      ->capture_default_str();
  sub->add_option("--threshold-fraction", o->threshold_fraction, "Body threshold as a fraction of p99")
      ->capture_default_str();
  sub->add_flag("--native", o->native, "Resample the result back onto the input grid");
  sub->add_option("--body-out", o->body_out, "Write the body mask (iso grid)");
  sub->add_option("--report", o->report, "JSON report path");
  return {sub, [o, sub] {
            const Image img = read_image(o->inphase);
            const Image iso = to_iso4(img);
            const Mask body = body_mask(iso, o->threshold_fraction);
            LabelMap q = compute_quadrants(body, o->bands);
            if (!o->body_out.empty()) write_volume(body, o->body_out);
            if (o->native) q = resample(q, img.grid(), Interpolation::nearest);
            write_volume(q, o->out);
            if (!o->report.empty()) {
              auto j = report_header(*sub, nullptr);
              j["output"] = shape_json(q.grid());
              std::map<std::int32_t, std::int64_t> counts;
              for (const auto v : q.data())
                if (v) ++counts[v];
              Json c = Json::object();
              for (const auto& [label, n] : counts) c[std::to_string(label)] = n;
              j["voxels_per_label"] = c;
              write_json(o->report, j);
            }
          }};
}

Command add_vertebrae(CLI::App& app, const Globals&) {
  struct Opts {
    std::string body, ivd, out, report, start_level = "C3";
    int body_label = -1, ivd_label = -1;
    InstanceLabelParams params;
    AnomalyParams anomaly;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("vertebrae", "Count vertebral bodies from the top and flag anomalies");
  sub->add_option("--body", o->body, "Vertebra body mask or labelmap")->required();
  sub->add_option("--body-label", o->body_label, "Label selecting vertebra body voxels (-1 = nonzero)")
      ->capture_default_str();
  sub->add_option("--ivd", o->ivd, "Intervertebral disc mask or labelmap");
  sub->add_option("--ivd-label", o->ivd_label, "Label selecting disc voxels (-1 = nonzero)")
      ->capture_default_str();
  sub->add_option("--out,-o", o->out, "Output instance labelmap")->required();
  sub->add_option("--report", o->report, "JSON report path");
  sub->add_option("--start-level", o->start_level, "Level of the most superior body")->capture_default_str();
  sub->add_option("--min-volume", o->params.min_volume_mm3, "Smallest counted component (mm^3)")
      ->capture_default_str();
  sub->add_option("--extent-factor", o->anomaly.extent_factor, "merged_suspect height ratio")
      ->capture_default_str();
  sub->add_option("--spacing-factor", o->anomaly.spacing_factor, "gap_suspect distance ratio")
      ->capture_default_str();
  return {sub, [o, sub] {
            const auto start = level_id(o->start_level);
            if (!start) throw ValidationError("unknown level '" + o->start_level + "'");
            o->params.start_level = *start;
            const Mask body = read_mask(o->body, o->body_label);
            std::optional<Mask> ivd;
            if (!o->ivd.empty()) ivd = read_mask(o->ivd, o->ivd_label);
            auto r = instance_label(body, ivd ? &*ivd : nullptr, o->params);
            const auto report = detect_anomalies(r.instances, r.report, o->anomaly);
            write_volume(r.instances, o->out);
            for (const auto& a : report.anomalies) warn(std::string(to_string(a.kind)) + ": " + a.detail);
            std::cout << report.assigned.size() << " levels assigned";
            if (!report.assigned.empty())
              std::cout << " (" << report.assigned.front().level << ".." << report.assigned.back().level << ")";
            std::cout << ", " << report.anomalies.size() << " anomalies\n";
            if (!o->report.empty()) {
              auto j = report_header(*sub, &builtin_schema());
              const auto body = Json::parse(spine_report_json(report));
              for (const auto& [k, v] : body.items()) j[k] = v;
              write_json(o->report, j);
            }
          }};
}

Command add_eval(CLI::App& app, const Globals& g) {
  struct Opts {
    std::vector<std::string> pred, ref;
    std::string schema, report, csv;
    BootstrapParams boot;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("eval", "Per-class Dice and ASSD with bootstrap confidence intervals");
  sub->add_option("--pred", o->pred, "Predicted labelmap; repeat per subject")->required();
  sub->add_option("--ref", o->ref, "Reference labelmap; repeat in the same order")->required();
  sub->add_option("--schema", o->schema, "Catalog JSON (default: builtin)");
  sub->add_option("--report", o->report, "JSON report path");
  sub->add_option("--csv", o->csv, "CSV report path");
  sub->add_option("--iterations", o->boot.iterations, "Bootstrap iterations")->capture_default_str();
  sub->add_option("--level", o->boot.level, "Confidence level")->capture_default_str();
  return {sub, [o, sub, &g] {
            if (o->pred.size() != o->ref.size())
              throw ValidationError("--pred and --ref must be given the same number of times");
            const auto schema = load_catalog(o->schema);
            std::vector<SubjectMetrics> subjects;
            for (std::size_t i = 0; i < o->pred.size(); ++i) {
              const LabelMap pred = read_labels(o->pred[i]);
              const LabelMap ref = read_labels(o->ref[i]);
              subjects.push_back({o->pred[i], per_class_report(pred, ref, schema)});
            }
            o->boot.seed = g.seed;
            const auto report = summarize(std::move(subjects), o->boot);
            std::cout << "macro dice " << report.dice_over_classes.mean << " +- " << report.dice_over_classes.sd
                      << " over " << report.dice_over_classes.count << " class values";
            if (report.dice_ci)
              std::cout << ", " << report.dice_ci->level * 100 << "% CI [" << report.dice_ci->lo << ", "
                        << report.dice_ci->hi << "]";
            std::cout << "\n";
            if (!o->report.empty()) {
              auto j = report_header(*sub, &schema);
              const auto body = Json::parse(report_json(report));
              for (const auto& [k, v] : body.items()) j[k] = v;
              write_json(o->report, j);
            }
            if (!o->csv.empty()) write_text(o->csv, report_csv(report));
          }};
}

Command add_infer(CLI::App& app, const Globals&) {
  struct Opts {
    std::string image, out, oracle, quadrants, report, kernel = "gaussian", precision = "f32";
    int num_classes = 0;
    std::vector<std::int64_t> patch = {kDefaultPatch[0], kDefaultPatch[1], kDefaultPatch[2]};
    double overlap = 0.5;
    std::size_t budget = std::size_t{2} << 30;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("infer", "Tiled, memory-bounded inference around a patch oracle");
  sub->add_option("--image", o->image, "Input image")->required();
  sub->add_option("--out,-o", o->out, "Output labelmap")->required();
  sub->add_option("--oracle", o->oracle,
                  "mock:constant:<c> | mock:threshold:<t> | mock:identity:<n> | mock:checkerboard | exec:<command>")
      ->required();
  sub->add_option("--num-classes", o->num_classes, "Class count reported by an exec oracle");
  sub->add_option("--quadrants", o->quadrants, "Quadrant labelmap passed as a second channel");
  sub->add_option("--patch", o->patch, "Patch size x,y,z in voxels")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  sub->add_option("--overlap", o->overlap, "Tile overlap fraction in [0, 1)")->capture_default_str();
  sub->add_option("--kernel", o->kernel, "Tile weighting")
      ->check(CLI::IsMember({"gaussian", "uniform"}))
      ->capture_default_str();
  sub->add_option("--precision", o->precision, "Accumulator precision")
      ->check(CLI::IsMember({"f32", "f16"}))
      ->capture_default_str();
  sub->add_option("--memory-budget", o->budget, "Accumulator budget, e.g. 512M or 2G")
      ->transform(CLI::AsSizeValue(false))
      ->default_str("2G");
  sub->add_option("--report", o->report, "JSON report path");
  return {sub, [o, sub] {
            const Image image = read_image(o->image);
            auto oracle = make_oracle(o->oracle, o->num_classes);
            std::optional<LabelMap> quadrants;
            if (!o->quadrants.empty()) {
              LabelMap q = read_labels(o->quadrants);
              quadrants = q.grid().same_as(image.grid()) ? std::move(q)
                                                         : resample(q, image.grid(), Interpolation::nearest);
            }
            InferParams p;
            p.patch = {o->patch[0], o->patch[1], o->patch[2]};
            p.overlap = o->overlap;
            p.kernel = o->kernel == "uniform" ? WeightKernel::uniform : WeightKernel::gaussian;
            p.fusion.memory_budget = o->budget;
            p.fusion.precision = o->precision == "f16" ? AccumulatorPrecision::f16 : AccumulatorPrecision::f32;
            auto r = infer(image, *oracle, p, quadrants ? &*quadrants : nullptr);
            write_volume(r.labels, o->out);
            if (!o->report.empty()) {
              auto j = report_header(*sub, nullptr);
              j["output"] = shape_json(r.labels.grid());
              j["num_classes"] = oracle->num_classes();
              j["oracle_calls"] = r.oracle_calls;
              j["chunk_depth"] = r.chunk_depth;
              j["peak_accumulator_bytes"] = r.peak_accumulator_bytes;
              write_json(o->report, j);
            }
          }};
}

Command add_schema(CLI::App& app, const Globals&) {
  struct Opts {
    std::string catalog = "builtin:vibe", out, a, b, labels, schema, source = "builtin:total-ct", report;
    bool strict = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("schema", "Inspect, compare and apply label catalogs");
  sub->require_subcommand(1);
  auto* dump = sub->add_subcommand("dump", "Print a catalog as JSON");
  dump->add_option("--catalog", o->catalog, "builtin:vibe, builtin:total-ct or a JSON file")
      ->capture_default_str();
  dump->add_option("--out,-o", o->out, "Write to a file instead of stdout");
  auto* diff = sub->add_subcommand("diff", "List differences between two catalogs");
  diff->add_option("a", o->a, "First catalog (file or builtin:...)")->required();
  diff->add_option("b", o->b, "Second catalog")->required();
  auto* validate = sub->add_subcommand("validate", "Check a labelmap against a catalog");
  validate->add_option("--labels", o->labels, "Labelmap")->required();
  validate->add_option("--schema", o->schema, "Catalog JSON (default: builtin)");
  validate->add_option("--report", o->report, "JSON report path");
  validate->add_flag("--strict", o->strict, "Fail on unknown ids or swapped left/right pairs");
  auto* map = sub->add_subcommand("map-ct", "Relabel a CT-catalog segmentation into the torso catalog");
  map->add_option("--labels", o->labels, "Labelmap in the source catalog")->required();
  map->add_option("--source", o->source, "Source catalog")->capture_default_str();
  map->add_option("--schema", o->schema, "Target catalog (default: builtin)");
  map->add_option("--out,-o", o->out, "Output labelmap")->required();
  map->add_option("--report", o->report, "JSON report path");

  return {sub, [=] {
            if (dump->parsed()) {
              const auto text = load_catalog(o->catalog).to_json() + "\n";
              if (o->out.empty()) std::cout << text;
              else write_text(o->out, text);
            } else if (diff->parsed()) {
              const auto lines = diff_schemas(load_catalog(o->a), load_catalog(o->b));
              if (lines.empty()) std::cout << "catalogs are identical\n";
              for (const auto& l : lines) std::cout << l << "\n";
            } else if (validate->parsed()) {
              const auto schema = load_catalog(o->schema);
              const LabelMap labels = read_labels(o->labels);
              const auto v = validate_labels(labels, schema);
              const auto lat = laterality_check(labels, schema);
              std::size_t swapped = 0;
              for (const auto& [id, n] : v.unknown_ids) std::cout << "unknown id " << id << ": " << n << " voxels\n";
              for (const auto& f : lat) {
                swapped += f.verdict == LateralityVerdict::swapped;
                std::cout << (f.verdict == LateralityVerdict::swapped ? "swapped " : "indeterminate ")
                          << f.left_name << "/" << f.right_name << " (" << f.left_offset_mm << ", "
                          << f.right_offset_mm << " mm)\n";
              }
              std::cout << v.present.size() << " classes present, " << v.unknown_ids.size() << " unknown ids, "
                        << swapped << " swapped pairs\n";
              if (!o->report.empty()) {
                auto j = report_header(*validate, &schema);
                Json present = Json::array();
                for (const auto& c : v.present)
                  present.push_back({{"id", c.id}, {"name", c.name}, {"voxels", c.voxels}, {"volume_mm3", c.volume_mm3}});
                Json unknown = Json::array();
                for (const auto& [id, n] : v.unknown_ids) unknown.push_back({{"id", id}, {"voxels", n}});
                Json findings = Json::array();
                for (const auto& f : lat)
                  findings.push_back({{"left", f.left_name},
                                      {"right", f.right_name},
                                      {"left_offset_mm", f.left_offset_mm},
                                      {"right_offset_mm", f.right_offset_mm},
                                      {"verdict", f.verdict == LateralityVerdict::swapped ? "swapped" : "indeterminate"}});
                j["present"] = present;
                j["unknown_ids"] = unknown;
                j["empty_groups"] = v.empty_groups;
                j["laterality"] = findings;
                write_json(o->report, j);
              }
              if (o->strict && (!v.unknown_ids.empty() || swapped > 0))
                throw ValidationError("labelmap fails catalog validation");
            } else if (map->parsed()) {
              const auto source = load_catalog(o->source);
              const auto target = load_catalog(o->schema);
              auto r = map_total_ct(read_labels(o->labels), source, target);
              warn_all(r.report.warnings);
              write_volume(r.labels, o->out);
              if (!o->report.empty()) {
                auto j = report_header(*map, &target);
                Json mapped = Json::array();
                for (const auto& m : r.report.mapped)
                  mapped.push_back({{"source_id", m.source_id}, {"source", m.source_name},
                                    {"target_id", m.target_id}, {"target", m.target_name}});
                Json dropped = Json::array();
                for (const auto& d : r.report.dropped)
                  dropped.push_back({{"source_id", d.source_id}, {"source", d.source_name}, {"reason", d.reason}});
                j["mapped"] = mapped;
                j["dropped"] = dropped;
                j["warnings"] = r.report.warnings;
                write_json(o->report, j);
              }
            }
          }};
}

Command add_augment(CLI::App& app, const Globals& g) {
  struct Opts {
    std::string in, out;
    ElasticParams params;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("augment", "Random elastic deformation (labelmaps use nearest sampling)");
  sub->add_option("--in,-i", o->in, "Input volume")->required();
  sub->add_option("--out,-o", o->out, "Output volume")->required();
  sub->add_option("--control-spacing", o->params.control_spacing_mm, "Control lattice spacing (mm)")
      ->capture_default_str();
  sub->add_option("--sigma", o->params.sigma_mm, "Displacement standard deviation (mm)")->capture_default_str();
  return {sub, [o, &g] {
            o->params.seed = g.seed;
            auto loaded = read_volume(o->in);
            warn_all(loaded.warnings);
            const auto field = elastic_field(std::visit([](const auto& v) { return v.grid(); }, loaded.volume),
                                             o->params);
            if (auto* img = std::get_if<Image>(&loaded.volume))
              write_any(warp(*img, field, Interpolation::trilinear), o->out);
            else
              write_any(warp(std::get<LabelMap>(loaded.volume), field, Interpolation::nearest), o->out);
            std::cout << "max displacement " << field.max_magnitude() << " mm\n";
          }};
}

}  // namespace torsoseg::cli
