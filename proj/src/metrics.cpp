#include "fisheye/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fisheye/errors.hpp"
#include "fisheye/parallel.hpp"

namespace fisheye {

const char* representation_name(Representation rep) {
    switch (rep) {
        case Representation::standard: return "standard";
        case Representation::curved: return "curved";
        case Representation::oriented: return "oriented";
        case Representation::ellipse: return "ellipse";
        case Representation::poly4: return "poly4";
        case Representation::poly24: return "poly24";
        case Representation::poly24_adaptive: return "poly24-adaptive";
    }
    return "unknown";
}

Representation representation_from_name(const std::string& name) {
    for (Representation rep : default_representations())
        if (name == representation_name(rep)) return rep;
    throw SchemaError("unknown representation: " + name);
}

std::vector<Representation> default_representations() {
    return {Representation::standard, Representation::curved,  Representation::oriented,
            Representation::ellipse,  Representation::poly4,   Representation::poly24,
            Representation::poly24_adaptive};
}

namespace {

int representation_params(Representation rep) {
    switch (rep) {
        case Representation::standard: return param_count(ShapeKind::standard_box);
        case Representation::curved: return param_count(ShapeKind::curved_box);
        case Representation::oriented: return param_count(ShapeKind::oriented_box);
        case Representation::ellipse: return param_count(ShapeKind::ellipse);
        case Representation::poly4: return param_count(ShapeKind::vertex_polygon, 4);
        case Representation::poly24: return param_count(ShapeKind::vertex_polygon, 24);
        case Representation::poly24_adaptive: return param_count(ShapeKind::vertex_polygon, 24);
    }
    return 0;
}

}  // namespace

VertexPolygon fit_uniform_polygon_best_phase(const Contour& contour,
                                             const BinaryMask& instance_mask, int n_vertices,
                                             int phases) {
    if (phases < 1) throw DegenerateInput("fit_uniform_polygon_best_phase: phases must be >= 1");
    const Contour dense = resample_arclength(contour, n_vertices * phases);
    const GridSpec2D grid{instance_mask.width(), instance_mask.height(), 1.0, {0.0, 0.0}};
    const Vec2 centroid = polygon_centroid(contour);

    double best_iou = -1.0;
    int best_phase = 0;
    std::vector<Vec2> verts(n_vertices);
    for (int j = 0; j < phases; ++j) {
        for (int i = 0; i < n_vertices; ++i)
            verts[i] = dense.vertices[static_cast<std::size_t>(j + i * phases) %
                                      dense.vertices.size()];
        double iou;
        try {
            const BinaryMask m =
                rasterize_polygon_clipped(Contour{verts, true}, grid);
            iou = mask_iou(m, instance_mask);
        } catch (const Error&) {
            continue;
        }
        if (iou > best_iou) {
            best_iou = iou;
            best_phase = j;
        }
    }
    if (best_iou < 0.0)
        throw DegenerateInput("fit_uniform_polygon_best_phase: no valid phase candidate");

    VertexPolygon out;
    out.origin = centroid;
    out.sampling = PolygonSampling::uniform_perimeter;
    out.vertices.reserve(n_vertices);
    for (int i = 0; i < n_vertices; ++i)
        out.vertices.push_back(dense.vertices[static_cast<std::size_t>(best_phase + i * phases) %
                                              dense.vertices.size()] -
                               centroid);
    return out;
}

namespace {

// Capacity fit of the oriented box: the representation contains the
// axis-aligned box as its zero-angle case, so score both the minimum-area
// rectangle and the bounding box and keep the better one (ties keep the
// minimum-area rectangle).
OrientedBox fit_oriented_box_capacity(const Contour& contour, const BinaryMask& instance_mask,
                                      double arc_tolerance) {
    const OrientedBox mar = fit_oriented_box(contour);
    const StandardBox sb = fit_standard_box(contour);
    const OrientedBox aa{sb.center, sb.width, sb.height, 0.0};
    const GridSpec2D grid{instance_mask.width(), instance_mask.height(), 1.0, {0.0, 0.0}};
    auto iou_of = [&](const OrientedBox& b) {
        try {
            return mask_iou(rasterize_polygon_clipped(shape_to_polygon(Shape{b}, arc_tolerance),
                                                      grid),
                            instance_mask);
        } catch (const Error&) {
            return 0.0;
        }
    };
    return iou_of(aa) > iou_of(mar) ? aa : mar;
}

}  // namespace

Shape fit_representation(Representation rep, const Contour& contour,
                         const BinaryMask& instance_mask, const MiouOptions& opts) {
    switch (rep) {
        case Representation::standard: return fit_standard_box(contour);
        case Representation::oriented:
            return fit_oriented_box_capacity(contour, instance_mask, opts.arc_tolerance);
        case Representation::ellipse: return fit_ellipse(contour);
        case Representation::curved: {
            CurvedBoxSearchConfig cfg = opts.curved;
            cfg.arc_tolerance = opts.arc_tolerance;
            return fit_curved_box(contour, instance_mask, cfg).box;
        }
        case Representation::poly4:
            return fit_uniform_polygon_best_phase(contour, instance_mask, 4, 32);
        case Representation::poly24: return sample_uniform_perimeter(contour, 24);
        case Representation::poly24_adaptive: {
            AdaptiveSamplingConfig cfg;
            cfg.target_vertices = 24;
            return sample_adaptive(contour, cfg);
        }
    }
    throw DegenerateInput("fit_representation: unknown representation");
}

namespace {

struct ObjectResult {
    bool ok = false;
    double iou = 0.0;
};

struct ImagePartial {
    // [rep][camera] sums plus failure counts.
    std::vector<double> iou_sum;
    std::vector<int> count;
    std::vector<int> failed;
};

}  // namespace

EvaluationReport representation_miou(const AnnotationFile& data,
                                     std::span<const Representation> reps,
                                     const MiouOptions& opts) {
    const std::size_t n_reps = reps.size();
    std::vector<ImagePartial> partials(data.images.size());

    parallel_for(
        data.images.size(),
        [&](std::size_t img_idx) {
            const AnnotatedImage& img = data.images[img_idx];
            ImagePartial& p = partials[img_idx];
            p.iou_sum.assign(n_reps * kCameraCount, 0.0);
            p.count.assign(n_reps * kCameraCount, 0);
            p.failed.assign(n_reps, 0);
            const int cam = static_cast<int>(img.camera);
            const GridSpec2D grid{img.width, img.height, 1.0, {0.0, 0.0}};

            for (const AnnotatedObject& obj : img.objects) {
                BinaryMask gt;
                try {
                    gt = rasterize_polygon_clipped(obj.contour, grid);
                    if (gt.count() == 0) throw DegenerateInput("empty instance mask");
                } catch (const Error&) {
                    if (!opts.lenient) throw;
                    for (std::size_t r = 0; r < n_reps; ++r) ++p.failed[r];
                    continue;
                }
                for (std::size_t r = 0; r < n_reps; ++r) {
                    try {
                        double iou;
                        if (reps[r] == Representation::curved) {
                            CurvedBoxSearchConfig cfg = opts.curved;
                            cfg.arc_tolerance = opts.arc_tolerance;
                            iou = fit_curved_box(obj.contour, gt, cfg).iou;
                        } else {
                            const Shape shape = fit_representation(reps[r], obj.contour, gt, opts);
                            const BinaryMask m = rasterize_polygon_clipped(
                                shape_to_polygon(shape, opts.arc_tolerance), grid);
                            iou = mask_iou(m, gt);
                        }
                        p.iou_sum[r * kCameraCount + cam] += iou;
                        ++p.count[r * kCameraCount + cam];
                    } catch (const Error&) {
                        if (!opts.lenient) throw;
                        ++p.failed[r];
                    }
                }
            }
        },
        opts.workers);

    EvaluationReport report;
    for (std::size_t r = 0; r < n_reps; ++r) {
        RepresentationScore row;
        row.rep = reps[r];
        row.params = representation_params(reps[r]);
        std::array<double, kCameraCount> sums{};
        for (const ImagePartial& p : partials) {
            if (p.iou_sum.empty()) continue;
            for (int c = 0; c < kCameraCount; ++c) {
                sums[c] += p.iou_sum[r * kCameraCount + c];
                row.objects_per_camera[c] += p.count[r * kCameraCount + c];
            }
            row.failed += p.failed[r];
        }
        double total = 0.0;
        for (int c = 0; c < kCameraCount; ++c) {
            row.miou_per_camera[c] =
                row.objects_per_camera[c] > 0 ? sums[c] / row.objects_per_camera[c] : 0.0;
            total += sums[c];
            row.objects += row.objects_per_camera[c];
        }
        row.miou = row.objects > 0 ? total / row.objects : 0.0;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<VertexStudyEntry> vertex_count_study(const AnnotationFile& data,
                                                 std::span<const int> vertex_counts,
                                                 const MiouOptions& opts) {
    struct Partial {
        std::vector<double> iou_sum;
        std::vector<int> count;
    };
    std::vector<Partial> partials(data.images.size());
    const std::size_t n_counts = vertex_counts.size();

    parallel_for(
        data.images.size(),
        [&](std::size_t img_idx) {
            const AnnotatedImage& img = data.images[img_idx];
            Partial& p = partials[img_idx];
            p.iou_sum.assign(n_counts, 0.0);
            p.count.assign(n_counts, 0);
            const GridSpec2D grid{img.width, img.height, 1.0, {0.0, 0.0}};
            for (const AnnotatedObject& obj : img.objects) {
                BinaryMask gt;
                try {
                    gt = rasterize_polygon_clipped(obj.contour, grid);
                    if (gt.count() == 0) continue;
                } catch (const Error&) {
                    if (!opts.lenient) throw;
                    continue;
                }
                for (std::size_t k = 0; k < n_counts; ++k) {
                    try {
                        const VertexPolygon poly =
                            sample_uniform_perimeter(obj.contour, vertex_counts[k]);
                        const BinaryMask m = rasterize_polygon_clipped(
                            shape_to_polygon(Shape{poly}, opts.arc_tolerance), grid);
                        p.iou_sum[k] += mask_iou(m, gt);
                        ++p.count[k];
                    } catch (const Error&) {
                        if (!opts.lenient) throw;
                    }
                }
            }
        },
        opts.workers);

    std::vector<VertexStudyEntry> out;
    for (std::size_t k = 0; k < n_counts; ++k) {
        VertexStudyEntry e;
        e.n = vertex_counts[k];
        double sum = 0.0;
        for (const Partial& p : partials) {
            if (p.iou_sum.empty()) continue;
            sum += p.iou_sum[k];
            e.objects += p.count[k];
        }
        e.miou = e.objects > 0 ? sum / e.objects : 0.0;
        out.push_back(e);
    }
    return out;
}

std::vector<GroundTruthDetection> ground_truth_from_annotations(const AnnotationFile& data,
                                                                const std::string& rep_key) {
    std::vector<GroundTruthDetection> out;
    for (const AnnotatedImage& img : data.images) {
        for (const AnnotatedObject& obj : img.objects) {
            const Shape* shape = obj.find_shape(rep_key);
            if (shape == nullptr)
                throw SchemaError("image \"" + img.image_id + "\" lacks fitted shape \"" +
                                  rep_key + "\"; run the fit step first");
            out.push_back({img.image_id, img.camera, obj.cls, *shape});
        }
    }
    return out;
}

ApReport average_precision(std::span<const PredictionEntry> predictions,
                           std::span<const GroundTruthDetection> ground_truth,
                           double iou_thresh, const ShapeIouFn& iou_fn) {
    const ShapeIouFn iou = iou_fn ? iou_fn : ShapeIouFn([](const Shape& a, const Shape& b) {
        return shape_pair_iou_mask(a, b);
    });

    // Group ground truth by class.
    std::map<std::string, std::vector<std::size_t>> gt_by_class;
    for (std::size_t i = 0; i < ground_truth.size(); ++i)
        gt_by_class[ground_truth[i].cls].push_back(i);

    ApReport report;
    std::vector<bool> gt_matched(ground_truth.size(), false);

    for (const auto& [cls, gt_indices] : gt_by_class) {
        std::vector<std::size_t> pred_indices;
        for (std::size_t i = 0; i < predictions.size(); ++i)
            if (predictions[i].cls == cls) pred_indices.push_back(i);
        std::stable_sort(pred_indices.begin(), pred_indices.end(), [&](std::size_t a, std::size_t b) {
            return predictions[a].confidence > predictions[b].confidence;
        });

        std::vector<bool> matched(gt_indices.size(), false);
        std::vector<int> is_tp(pred_indices.size(), 0);
        for (std::size_t pi = 0; pi < pred_indices.size(); ++pi) {
            const PredictionEntry& pred = predictions[pred_indices[pi]];
            double best_iou = 0.0;
            std::size_t best_gt = gt_indices.size();
            for (std::size_t gi = 0; gi < gt_indices.size(); ++gi) {
                if (matched[gi]) continue;
                const GroundTruthDetection& gt = ground_truth[gt_indices[gi]];
                if (gt.image_id != pred.image_id) continue;
                const double v = iou(pred.shape, gt.shape);
                if (v >= iou_thresh && v > best_iou) {
                    best_iou = v;
                    best_gt = gi;
                }
            }
            if (best_gt < gt_indices.size()) {
                matched[best_gt] = true;
                gt_matched[gt_indices[best_gt]] = true;
                is_tp[pi] = 1;
                const int cam = static_cast<int>(ground_truth[gt_indices[best_gt]].camera);
                report.matched_iou_per_camera[cam] += best_iou;
                ++report.matched_per_camera[cam];
            }
        }

        // All-point interpolated AP.
        const double n_gt = static_cast<double>(gt_indices.size());
        std::vector<double> precision(pred_indices.size()), recall(pred_indices.size());
        int tp = 0;
        for (std::size_t pi = 0; pi < pred_indices.size(); ++pi) {
            tp += is_tp[pi];
            precision[pi] = static_cast<double>(tp) / static_cast<double>(pi + 1);
            recall[pi] = static_cast<double>(tp) / n_gt;
        }
        double ap = 0.0;
        double running_max = 0.0;
        double prev_recall = 0.0;
        std::vector<double> envelope(pred_indices.size());
        for (std::size_t pi = pred_indices.size(); pi-- > 0;) {
            running_max = std::max(running_max, precision[pi]);
            envelope[pi] = running_max;
        }
        for (std::size_t pi = 0; pi < pred_indices.size(); ++pi) {
            ap += (recall[pi] - prev_recall) * envelope[pi];
            prev_recall = recall[pi];
        }
        report.per_class.push_back(
            {cls, ap, static_cast<int>(gt_indices.size()), static_cast<int>(pred_indices.size())});
    }

    if (!report.per_class.empty()) {
        double sum = 0.0;
        for (const ClassAp& c : report.per_class) sum += c.ap;
        report.map = sum / static_cast<double>(report.per_class.size());
    }
    double iou_total = 0.0;
    int match_total = 0;
    for (int c = 0; c < kCameraCount; ++c) {
        iou_total += report.matched_iou_per_camera[c];
        match_total += report.matched_per_camera[c];
        if (report.matched_per_camera[c] > 0)
            report.matched_iou_per_camera[c] /= report.matched_per_camera[c];
    }
    report.matched_miou = match_total > 0 ? iou_total / match_total : 0.0;
    return report;
}

}  // namespace fisheye
