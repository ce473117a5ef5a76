#include "fisheye/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fisheye/errors.hpp"
#include "fisheye/overlay.hpp"
#include "fisheye/parallel.hpp"
#include "fisheye/report.hpp"
#include "fisheye/sampling.hpp"
#include "fisheye/synth.hpp"

namespace fisheye {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path.string() + " for writing");
    f << content;
}

std::vector<Representation> resolve_reps(const std::vector<std::string>& names) {
    if (names.empty()) return default_representations();
    std::vector<Representation> out;
    out.reserve(names.size());
    for (const std::string& n : names) out.push_back(representation_from_name(n));
    return out;
}

// Fits every requested representation into the annotation set in place,
// recording per-object IoU against the rasterized instance mask.
void fit_annotations(AnnotationFile& data, const std::vector<Representation>& reps,
                     const MiouOptions& opts) {
    parallel_for(
        data.images.size(),
        [&](std::size_t idx) {
            AnnotatedImage& img = data.images[idx];
            const GridSpec2D grid{img.width, img.height, 1.0, {0.0, 0.0}};
            for (AnnotatedObject& obj : img.objects) {
                BinaryMask gt;
                try {
                    gt = rasterize_polygon_clipped(obj.contour, grid);
                    if (gt.count() == 0) throw DegenerateInput("empty instance mask");
                } catch (const Error&) {
                    if (!opts.lenient) throw;
                    continue;
                }
                for (Representation rep : reps) {
                    try {
                        double iou;
                        Shape shape;
                        if (rep == Representation::curved) {
                            CurvedBoxSearchConfig cfg = opts.curved;
                            cfg.arc_tolerance = opts.arc_tolerance;
                            const CurvedBoxFit fit = fit_curved_box(obj.contour, gt, cfg);
                            shape = fit.box;
                            iou = fit.iou;
                        } else {
                            shape = fit_representation(rep, obj.contour, gt, opts);
                            const BinaryMask m = rasterize_polygon_clipped(
                                shape_to_polygon(shape, opts.arc_tolerance), grid);
                            iou = mask_iou(m, gt);
                        }
                        obj.set_shape(representation_name(rep), std::move(shape));
                        obj.set_iou(representation_name(rep), iou);
                    } catch (const Error&) {
                        if (!opts.lenient) throw;
                    }
                }
            }
        },
        opts.workers);
}

}  // namespace

int cmd_gen_synth(const GenSynthOptions& opts) {
    const CameraRig rig = load_calibration(opts.calibration_path);
    SynthOptions synth;
    synth.seed = opts.seed;
    synth.n_scenes = opts.n_scenes;
    synth.scene_template.n_objects = opts.objects_per_scene;
    synth.workers = opts.workers;
    const AnnotationFile annotations = synthesize_annotations(rig, synth);

    fs::create_directories(opts.out_dir);
    save_annotations(annotations, (fs::path(opts.out_dir) / "annotations.json").string());

    if (opts.write_masks) {
        fs::create_directories(fs::path(opts.out_dir) / "masks");
        for (const AnnotatedImage& img : annotations.images) {
            const GridSpec2D grid{img.width, img.height, 1.0, {0.0, 0.0}};
            int k = 0;
            for (const AnnotatedObject& obj : img.objects) {
                const BinaryMask mask = rasterize_polygon_clipped(obj.contour, grid);
                char name[96];
                std::snprintf(name, sizeof(name), "%s_obj%03d.pgm", img.image_id.c_str(), k++);
                write_pgm_file(mask, (fs::path(opts.out_dir) / "masks" / name).string());
            }
        }
    }
    if (opts.write_previews) {
        fs::create_directories(fs::path(opts.out_dir) / "previews");
        const std::vector<std::string> no_reps;
        for (const AnnotatedImage& img : annotations.images) {
            const std::string svg = render_overlay(img, no_reps);
            write_text(fs::path(opts.out_dir) / "previews" / (img.image_id + ".svg"), svg);
        }
    }

    int objects = 0;
    for (const AnnotatedImage& img : annotations.images) objects += static_cast<int>(img.objects.size());
    std::printf("gen-synth: %zu images, %d objects -> %s\n", annotations.images.size(), objects,
                opts.out_dir.c_str());
    return 0;
}

int cmd_fit(const FitOptions& opts) {
    AnnotationFile data = load_annotations(opts.annotations_path);
    MiouOptions mopts;
    mopts.lenient = opts.lenient;
    mopts.workers = opts.workers;
    const auto reps = resolve_reps(opts.reps);
    fit_annotations(data, reps, mopts);
    save_annotations(data, opts.out_path);
    std::printf("fit: %zu images, %zu representations -> %s\n", data.images.size(), reps.size(),
                opts.out_path.c_str());
    return 0;
}

int cmd_sample(const SampleOptions& opts) {
    AnnotationFile data = load_annotations(opts.annotations_path);
    std::string key;
    if (opts.mode == "angular") key = "polar" + std::to_string(opts.n);
    else if (opts.mode == "perimeter") key = "poly" + std::to_string(opts.n);
    else if (opts.mode == "adaptive") key = "poly" + std::to_string(opts.n) + "-adaptive";
    else throw SchemaError("sample: unknown mode " + opts.mode);

    parallel_for(
        data.images.size(),
        [&](std::size_t idx) {
            AnnotatedImage& img = data.images[idx];
            for (AnnotatedObject& obj : img.objects) {
                try {
                    Shape shape;
                    if (opts.mode == "angular") {
                        shape = sample_uniform_angular(obj.contour, opts.n);
                    } else if (opts.mode == "perimeter") {
                        shape = sample_uniform_perimeter(obj.contour, opts.n);
                    } else {
                        AdaptiveSamplingConfig cfg;
                        cfg.target_vertices = opts.n;
                        shape = sample_adaptive(obj.contour, cfg);
                    }
                    obj.set_shape(key, std::move(shape));
                } catch (const Error&) {
                    if (!opts.lenient) throw;
                }
            }
        },
        opts.workers);

    save_annotations(data, opts.out_path);
    std::printf("sample: mode=%s n=%d key=%s -> %s\n", opts.mode.c_str(), opts.n, key.c_str(),
                opts.out_path.c_str());
    return 0;
}

int cmd_eval_miou(const EvalMiouOptions& opts) {
    const AnnotationFile data = load_annotations(opts.annotations_path);
    MiouOptions mopts;
    mopts.lenient = opts.lenient;
    mopts.workers = opts.workers;
    const auto reps = resolve_reps(opts.reps);

    fs::create_directories(opts.out_dir);
    const EvaluationReport report = representation_miou(data, reps, mopts);
    write_text(fs::path(opts.out_dir) / "report.json", report_to_json(report));
    write_text(fs::path(opts.out_dir) / "report.csv", emit_report(report, ReportFormat::csv));
    write_text(fs::path(opts.out_dir) / "report.md", emit_report(report, ReportFormat::markdown));
    std::fputs(emit_report(report, ReportFormat::markdown).c_str(), stdout);

    if (opts.vertex_study) {
        const auto study = vertex_count_study(data, opts.vertex_counts, mopts);
        write_text(fs::path(opts.out_dir) / "vertex_study.csv",
                   emit_vertex_study(study, ReportFormat::csv));
        write_text(fs::path(opts.out_dir) / "vertex_study.md",
                   emit_vertex_study(study, ReportFormat::markdown));
        std::fputs(emit_vertex_study(study, ReportFormat::markdown).c_str(), stdout);
    }
    return 0;
}

int cmd_eval_map(const EvalMapOptions& opts) {
    const AnnotationFile data = load_annotations(opts.annotations_path);
    const PredictionFile preds = load_predictions(opts.predictions_path);
    const auto gt = ground_truth_from_annotations(data, opts.rep);
    const ApReport report = average_precision(preds.detections, gt, opts.iou_thresh);

    fs::create_directories(opts.out_dir);
    write_text(fs::path(opts.out_dir) / "map_report.csv", emit_ap_report(report, ReportFormat::csv));
    write_text(fs::path(opts.out_dir) / "map_report.md",
               emit_ap_report(report, ReportFormat::markdown));
    std::fputs(emit_ap_report(report, ReportFormat::markdown).c_str(), stdout);
    return 0;
}

int cmd_fit_division(const FitDivisionOptions& opts) {
    const CameraRig rig = load_calibration(opts.calibration_path);
    const RigCamera& cam = rig.camera(camera_id_from_name(opts.camera));
    const DivisionFitResult fit = fit_division_model(cam.model, opts.samples);

    std::printf("fit-division camera=%s f=%.6f lambda=%.9e max_residual_px=%.6f\n",
                opts.camera.c_str(), fit.model.f(), fit.model.lambda(), fit.max_abs_residual);

    if (!opts.out_csv.empty()) {
        std::ostringstream os;
        os << "theta_rad,theta_deg,residual_px\n";
        char line[96];
        for (std::size_t i = 0; i < fit.theta_samples.size(); ++i) {
            std::snprintf(line, sizeof(line), "%.9f,%.6f,%.9f\n", fit.theta_samples[i],
                          rad_to_deg(fit.theta_samples[i]), fit.residuals[i]);
            os << line;
        }
        write_text(opts.out_csv, os.str());
    }
    return 0;
}

int cmd_nms(const NmsOptions& opts) {
    const PredictionFile preds = load_predictions(opts.predictions_path);

    // Group per image; suppression never crosses images.
    std::vector<std::string> image_order;
    std::map<std::string, std::vector<std::size_t>> by_image;
    for (std::size_t i = 0; i < preds.detections.size(); ++i) {
        auto [it, inserted] = by_image.try_emplace(preds.detections[i].image_id);
        if (inserted) image_order.push_back(preds.detections[i].image_id);
        it->second.push_back(i);
    }

    // Class names to stable ids.
    std::vector<std::string> classes;
    for (const auto& d : preds.detections) classes.push_back(d.cls);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    auto class_id = [&](const std::string& cls) {
        return static_cast<int>(std::lower_bound(classes.begin(), classes.end(), cls) -
                                classes.begin());
    };

    PredictionFile out;
    for (const std::string& image_id : image_order) {
        std::vector<DetectionRecord> records;
        const auto& indices = by_image[image_id];
        for (std::size_t i : indices)
            records.push_back({preds.detections[i].shape, class_id(preds.detections[i].cls),
                               preds.detections[i].confidence});
        const auto kept = nms_generalized(records, opts.score_thresh, opts.iou_thresh);
        for (const DetectionRecord& r : kept)
            out.detections.push_back({image_id, classes[static_cast<std::size_t>(r.class_id)],
                                      r.confidence, r.shape});
    }
    save_predictions(out, opts.out_path);
    std::printf("nms: %zu -> %zu detections -> %s\n", preds.detections.size(),
                out.detections.size(), opts.out_path.c_str());
    return 0;
}

int cmd_report(const ReportOptions& opts) {
    std::ifstream f(opts.report_path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + opts.report_path);
    std::ostringstream ss;
    ss << f.rdbuf();
    const EvaluationReport report = report_from_json(ss.str());
    const ReportFormat format =
        opts.format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
    const std::string text = emit_report(report, format);
    if (opts.out_path.empty()) std::fputs(text.c_str(), stdout);
    else write_text(opts.out_path, text);
    return 0;
}

int cmd_render(const RenderOptions& opts) {
    const AnnotationFile data = load_annotations(opts.annotations_path);
    const std::vector<std::string> reps =
        opts.reps.empty()
            ? std::vector<std::string>{"standard", "curved", "oriented", "ellipse",
                                       "poly4",    "poly24", "poly24-adaptive"}
            : opts.reps;
    fs::create_directories(opts.out_dir);
    int rendered = 0;
    for (const AnnotatedImage& img : data.images) {
        if (!opts.image_id.empty() && img.image_id != opts.image_id) continue;
        write_text(fs::path(opts.out_dir) / (img.image_id + ".svg"), render_overlay(img, reps));
        ++rendered;
    }
    if (!opts.image_id.empty() && rendered == 0)
        throw SchemaError("render: image_id \"" + opts.image_id + "\" not found");
    std::printf("render: %d overlay(s) -> %s\n", rendered, opts.out_dir.c_str());
    return 0;
}

}  // namespace fisheye
