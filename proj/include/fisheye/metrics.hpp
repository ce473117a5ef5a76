#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fisheye/annotations.hpp"
#include "fisheye/detect.hpp"
#include "fisheye/fitting.hpp"
#include "fisheye/sampling.hpp"

namespace fisheye {

enum class Representation {
    standard,
    curved,
    oriented,
    ellipse,
    poly4,
    poly24,
    poly24_adaptive,
};

const char* representation_name(Representation rep);
Representation representation_from_name(const std::string& name);
// Capacity-table row order.
std::vector<Representation> default_representations();

struct MiouOptions {
    double arc_tolerance = kDefaultArcTolerance;
    int workers = 0;
    bool lenient = false;  // skip objects whose fit fails instead of rethrowing
    CurvedBoxSearchConfig curved;
};

// Fits one representation to an instance contour; `instance_mask` is the
// rasterized contour on the evaluation grid (needed by the curved-box and
// polygon-phase searches).
Shape fit_representation(Representation rep, const Contour& contour,
                         const BinaryMask& instance_mask, const MiouOptions& opts = {});

// Capacity fit of the 4-gon: uniform-perimeter vertices with the arc-length
// phase chosen by mask IoU over `phases` deterministic offsets. With only four
// vertices the phase dominates what the representation can express; for denser
// polygons the canonical vertex-0 phase is used instead.
VertexPolygon fit_uniform_polygon_best_phase(const Contour& contour,
                                             const BinaryMask& instance_mask, int n_vertices,
                                             int phases = 16);

inline constexpr int kCameraCount = 4;

struct RepresentationScore {
    Representation rep;
    std::array<double, kCameraCount> miou_per_camera{};  // indexed by CameraId
    std::array<int, kCameraCount> objects_per_camera{};
    double miou = 0.0;  // object-weighted aggregate
    int objects = 0;
    int failed = 0;
    int params = 0;
};

struct EvaluationReport {
    std::vector<RepresentationScore> rows;
};

// Per-object: fit, rasterize on the native image grid, IoU against the
// rasterized instance mask; means per camera plus the aggregate.
EvaluationReport representation_miou(const AnnotationFile& data,
                                     std::span<const Representation> reps,
                                     const MiouOptions& opts = {});

struct VertexStudyEntry {
    int n = 0;
    double miou = 0.0;
    int objects = 0;
};

// Uniform-perimeter polygon capacity as a function of the vertex count.
std::vector<VertexStudyEntry> vertex_count_study(const AnnotationFile& data,
                                                 std::span<const int> vertex_counts,
                                                 const MiouOptions& opts = {});

struct GroundTruthDetection {
    std::string image_id;
    CameraId camera = CameraId::front;
    std::string cls;
    Shape shape;
};

std::vector<GroundTruthDetection> ground_truth_from_annotations(const AnnotationFile& data,
                                                                const std::string& rep_key);

struct ClassAp {
    std::string cls;
    double ap = 0.0;
    int gt_count = 0;
    int prediction_count = 0;
};

struct ApReport {
    std::vector<ClassAp> per_class;  // classes with ground truth only
    double map = 0.0;
    std::array<double, kCameraCount> matched_iou_per_camera{};
    std::array<int, kCameraCount> matched_per_camera{};
    double matched_miou = 0.0;
};

// Greedy confidence-descending matching (each ground truth matched at most
// once, IoU >= threshold), all-point interpolated AP per class; classes without
// ground truth are excluded. Also reports the mean IoU of matched detections
// per camera.
ApReport average_precision(std::span<const PredictionEntry> predictions,
                           std::span<const GroundTruthDetection> ground_truth,
                           double iou_thresh = 0.5, const ShapeIouFn& iou_fn = {});

}  // namespace fisheye
