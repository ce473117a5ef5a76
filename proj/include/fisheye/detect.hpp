#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fisheye/shapes.hpp"
#include "fisheye/vec.hpp"

namespace fisheye {

// Detection grid: S x S cells, B anchors per cell.
struct GridSpec {
    int cells_per_side = 1;     // S
    int anchors_per_cell = 1;   // B
    std::vector<Vec2> anchors;  // (w, h) per anchor, pixels
};

struct LossWeights {
    double lambda_coord = 5.0;
};

// 18 bins of 10 degrees covering [-90, 90).
struct OrientationBins {
    static constexpr int count = 18;
    static constexpr double width_deg = 10.0;
    static constexpr double min_deg = -90.0;
};

int orientation_bin_index(double angle_deg);
double orientation_bin_center(int bin);
// Encode then decode; the result is within +-5 degrees of the input.
double orientation_bin_roundtrip(double angle_deg);

// Anchor precomputation: k-means over object (w, h) pairs with 1 - IoU as the
// distance, deterministic seeding (area-sorted quantile init). Returns anchors
// sorted by area.
std::vector<Vec2> compute_anchors(std::span<const Vec2> object_sizes, int k,
                                  int max_iterations = 100);

// One (cell, anchor) slot. Targets and predictions share the layout; targets
// use hard probabilities and carry the responsibility indicator.
struct CellSlot {
    bool responsible = false;
    double objectness = 0.0;
    std::vector<double> class_probs;
    double x = 0.0, y = 0.0;  // object center, pixels
    double w = 0.0, h = 0.0;  // object extent, pixels
    double angle_deg = 0.0;
    std::vector<double> angle_bin_probs;  // classification-mode predictions
    double area = 0.0;
    std::vector<double> polar_r;      // per polygon sector
    std::vector<double> polar_theta;  // radians
    std::vector<double> polar_alpha;
};

struct Tensor {
    GridSpec grid;
    int n_classes = 0;
    std::vector<CellSlot> slots;  // S*S*B, cell-major then anchor

    CellSlot& at(int cell, int anchor);
    const CellSlot& at(int cell, int anchor) const;
};

Tensor make_tensor(const GridSpec& grid, int n_classes);

struct ObjectLabel {
    Shape shape;
    int class_id = 0;
};

// Responsible cell = the cell whose half-open bounds contain the shape center;
// responsible anchor = argmax centered wh-IoU against the anchor set, ties to
// the lowest index.
Tensor assign_targets(std::span<const ObjectLabel> objects, const GridSpec& grid, Vec2 image_size,
                      int n_classes);

struct BoxLoss {
    double xy = 0.0;
    double wh = 0.0;
    double obj = 0.0;
    double cls = 0.0;
    double total = 0.0;
};

BoxLoss loss_box(const Tensor& pred, const Tensor& target, const LossWeights& weights);

double loss_xy(const Tensor& pred, const Tensor& target, const LossWeights& weights);
double loss_wh(const Tensor& pred, const Tensor& target, const LossWeights& weights);
double loss_objectness(const Tensor& pred, const Tensor& target);
double loss_class(const Tensor& pred, const Tensor& target);

enum class OrientationMode { regression, classification };

// Regression: sum of squared angle differences (degrees^2) over responsible
// slots; `wrapped` switches to the wrapped difference mod 180. Classification:
// cross-entropy over the 18 bins.
double loss_orientation(const Tensor& pred, const Tensor& target, OrientationMode mode,
                        bool wrapped = false);

double loss_area(const Tensor& pred, const Tensor& target, const LossWeights& weights);

struct PolarLoss {
    double cods = 0.0;
    double mask = 0.0;
    double total = 0.0;  // cods + mask + xy + obj + class
};

PolarLoss loss_polar_polygon(const Tensor& pred, const Tensor& target, const LossWeights& weights);

// Cross-entropy losses are reported raw; subtracting the target's own entropy
// gives the excess that is zero at a perfect match.
double entropy_floor(const Tensor& target);

// Analytic gradients with respect to prediction fields; each returns a tensor
// whose corresponding fields hold the partial derivatives.
Tensor loss_xy_gradient(const Tensor& pred, const Tensor& target, const LossWeights& weights);
Tensor loss_wh_gradient(const Tensor& pred, const Tensor& target, const LossWeights& weights);
Tensor loss_area_gradient(const Tensor& pred, const Tensor& target, const LossWeights& weights);
Tensor loss_orientation_gradient(const Tensor& pred, const Tensor& target, bool wrapped = false);
// Gradients land in polar_r / polar_theta / polar_alpha.
Tensor loss_polar_cods_gradient(const Tensor& pred, const Tensor& target);

struct DetectionRecord {
    Shape shape;
    int class_id = 0;
    double confidence = 0.0;
};

using ShapeIouFn = std::function<double(const Shape&, const Shape&)>;

// Convex shapes go through polygon clipping; pairs involving a non-convex
// polygon fall back to rasterized IoU.
double shape_pair_iou(const Shape& a, const Shape& b);
double shape_pair_iou_mask(const Shape& a, const Shape& b, int long_side = 512);

// Greedy confidence-descending suppression of same-class detections above the
// IoU threshold. Deterministic: ties keep the earlier input index.
std::vector<DetectionRecord> nms_generalized(std::span<const DetectionRecord> detections,
                                             double score_thresh, double iou_thresh,
                                             const ShapeIouFn& iou_fn = {});

}  // namespace fisheye
