#include "fisheye/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fisheye/errors.hpp"

namespace fisheye {

namespace {

constexpr double kLogFloor = 1e-12;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteInput(std::string("non-finite value in ") + what);
}

double xlogy(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(std::max(y, kLogFloor));
}

void check_conformant(const Tensor& pred, const Tensor& target) {
    if (pred.slots.size() != target.slots.size() || pred.n_classes != target.n_classes)
        throw DimensionMismatch("prediction and target tensors are not conformant");
}

}  // namespace

int orientation_bin_index(double angle_deg) {
    if (angle_deg < OrientationBins::min_deg ||
        angle_deg >= OrientationBins::min_deg + OrientationBins::count * OrientationBins::width_deg)
        throw AngleOutOfRange("orientation angle outside [-90, 90)");
    const int bin = static_cast<int>(
        std::floor((angle_deg - OrientationBins::min_deg) / OrientationBins::width_deg));
    return std::min(bin, OrientationBins::count - 1);
}

double orientation_bin_center(int bin) {
    return OrientationBins::min_deg + (bin + 0.5) * OrientationBins::width_deg;
}

double orientation_bin_roundtrip(double angle_deg) {
    return orientation_bin_center(orientation_bin_index(angle_deg));
}

namespace {

double anchor_iou(Vec2 a, Vec2 b) {
    const double inter = std::min(a.x, b.x) * std::min(a.y, b.y);
    const double uni = a.x * a.y + b.x * b.y - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace

std::vector<Vec2> compute_anchors(std::span<const Vec2> object_sizes, int k, int max_iterations) {
    if (k < 1) throw DegenerateInput("compute_anchors: k must be at least 1");
    if (object_sizes.size() < static_cast<std::size_t>(k))
        throw DegenerateInput("compute_anchors: need at least k object sizes");

    // Deterministic seeding: quantiles of the area-sorted sizes.
    std::vector<Vec2> sorted(object_sizes.begin(), object_sizes.end());
    std::sort(sorted.begin(), sorted.end(), [](Vec2 a, Vec2 b) {
        const double aa = a.x * a.y, ab = b.x * b.y;
        return aa < ab || (aa == ab && a.x < b.x);
    });
    std::vector<Vec2> centers(k);
    for (int c = 0; c < k; ++c)
        centers[c] = sorted[(sorted.size() - 1) * (2 * c + 1) / (2 * k)];

    std::vector<int> assignment(sorted.size(), -1);
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            int best = 0;
            double best_d = 2.0;
            for (int c = 0; c < k; ++c) {
                const double d = 1.0 - anchor_iou(sorted[i], centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        for (int c = 0; c < k; ++c) {
            Vec2 sum{};
            int count = 0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                if (assignment[i] != c) continue;
                sum += sorted[i];
                ++count;
            }
            if (count > 0) centers[c] = sum / static_cast<double>(count);
        }
    }
    std::sort(centers.begin(), centers.end(),
              [](Vec2 a, Vec2 b) { return a.x * a.y < b.x * b.y; });
    return centers;
}

CellSlot& Tensor::at(int cell, int anchor) {
    return slots[static_cast<std::size_t>(cell) * grid.anchors_per_cell + anchor];
}

const CellSlot& Tensor::at(int cell, int anchor) const {
    return slots[static_cast<std::size_t>(cell) * grid.anchors_per_cell + anchor];
}

Tensor make_tensor(const GridSpec& grid, int n_classes) {
    if (grid.cells_per_side < 1 || grid.anchors_per_cell < 1)
        throw DegenerateInput("GridSpec: S and B must be at least 1");
    if (static_cast<int>(grid.anchors.size()) != grid.anchors_per_cell)
        throw DegenerateInput("GridSpec: anchor list size must equal B");
    Tensor t;
    t.grid = grid;
    t.n_classes = n_classes;
    t.slots.resize(static_cast<std::size_t>(grid.cells_per_side) * grid.cells_per_side *
                   grid.anchors_per_cell);
    for (auto& s : t.slots) s.class_probs.assign(std::max(0, n_classes), 0.0);
    return t;
}

namespace {

// IoU of two centered (w, h) boxes.
double centered_wh_iou(Vec2 a, Vec2 b) {
    const double inter = std::min(a.x, b.x) * std::min(a.y, b.y);
    const double uni = a.x * a.y + b.x * b.y - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace

Tensor assign_targets(std::span<const ObjectLabel> objects, const GridSpec& grid, Vec2 image_size,
                      int n_classes) {
    Tensor t = make_tensor(grid, n_classes);
    const int s = grid.cells_per_side;
    const double cell_w = image_size.x / s;
    const double cell_h = image_size.y / s;

    for (const ObjectLabel& obj : objects) {
        const Vec2 center = shape_center(obj.shape);
        if (center.x < 0.0 || center.x >= image_size.x || center.y < 0.0 ||
            center.y >= image_size.y)
            throw CenterOutOfImage("assign_targets: object center outside the image");
        const int cx = std::min(s - 1, static_cast<int>(center.x / cell_w));
        const int cy = std::min(s - 1, static_cast<int>(center.y / cell_h));
        const int cell = cy * s + cx;

        const Aabb box = bounding_box(shape_to_polygon(obj.shape, 0.5));
        const Vec2 wh{box.width(), box.height()};
        int best_anchor = 0;
        double best_iou = -1.0;
        for (int a = 0; a < grid.anchors_per_cell; ++a) {
            const double iou = centered_wh_iou(wh, grid.anchors[a]);
            if (iou > best_iou) {
                best_iou = iou;
                best_anchor = a;
            }
        }

        CellSlot& slot = t.at(cell, best_anchor);
        slot.responsible = true;
        slot.objectness = 1.0;
        if (obj.class_id >= 0 && obj.class_id < n_classes) slot.class_probs[obj.class_id] = 1.0;
        slot.x = center.x;
        slot.y = center.y;
        slot.w = wh.x;
        slot.h = wh.y;
        slot.area = shape_area(obj.shape);
        if (const auto* ob = std::get_if<OrientedBox>(&obj.shape)) slot.angle_deg = ob->angle_deg;
        if (const auto* el = std::get_if<EllipseShape>(&obj.shape)) slot.angle_deg = el->angle_deg;
        if (const auto* pp = std::get_if<PolarPolygon>(&obj.shape)) {
            slot.polar_r.clear();
            slot.polar_theta.clear();
            slot.polar_alpha.clear();
            for (const auto& sec : pp->sectors) {
                slot.polar_r.push_back(sec.r);
                slot.polar_theta.push_back(sec.theta);
                slot.polar_alpha.push_back(static_cast<double>(sec.alpha));
            }
        }
    }
    return t;
}

double loss_xy(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        check_finite(p.x, "loss_xy");
        check_finite(p.y, "loss_xy");
        acc += (t.x - p.x) * (t.x - p.x) + (t.y - p.y) * (t.y - p.y);
    }
    return weights.lambda_coord * acc;
}

double loss_wh(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        check_finite(p.w, "loss_wh");
        check_finite(p.h, "loss_wh");
        if (p.w < 0.0 || p.h < 0.0 || t.w < 0.0 || t.h < 0.0)
            throw NonFiniteInput("loss_wh: negative extent");
        const double dw = std::sqrt(t.w) - std::sqrt(p.w);
        const double dh = std::sqrt(t.h) - std::sqrt(p.h);
        acc += dw * dw + dh * dh;
    }
    return weights.lambda_coord * acc;
}

double loss_objectness(const Tensor& pred, const Tensor& target) {
    check_conformant(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const double c = target.slots[i].objectness;
        const double ch = pred.slots[i].objectness;
        check_finite(ch, "loss_objectness");
        acc -= xlogy(c, ch) + xlogy(1.0 - c, 1.0 - ch);
    }
    return acc;
}

double loss_class(const Tensor& pred, const Tensor& target) {
    check_conformant(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        for (int c = 0; c < target.n_classes; ++c) {
            check_finite(p.class_probs[c], "loss_class");
            acc -= xlogy(t.class_probs[c], p.class_probs[c]);
        }
    }
    return acc;
}

BoxLoss loss_box(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    BoxLoss out;
    out.xy = loss_xy(pred, target, weights);
    out.wh = loss_wh(pred, target, weights);
    out.obj = loss_objectness(pred, target);
    out.cls = loss_class(pred, target);
    out.total = out.xy + out.wh + out.obj + out.cls;
    return out;
}

namespace {

double wrapped_angle_diff_deg(double a, double b) {
    double d = std::fmod(a - b, 180.0);
    if (d < -90.0) d += 180.0;
    if (d >= 90.0) d -= 180.0;
    return d;
}

}  // namespace

double loss_orientation(const Tensor& pred, const Tensor& target, OrientationMode mode,
                        bool wrapped) {
    check_conformant(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        if (mode == OrientationMode::regression) {
            check_finite(p.angle_deg, "loss_orientation");
            const double d = wrapped ? wrapped_angle_diff_deg(t.angle_deg, p.angle_deg)
                                     : t.angle_deg - p.angle_deg;
            acc += d * d;
        } else {
            const int bin = orientation_bin_index(t.angle_deg);
            if (p.angle_bin_probs.size() != static_cast<std::size_t>(OrientationBins::count))
                throw DimensionMismatch("loss_orientation: expected 18 bin probabilities");
            acc -= xlogy(1.0, p.angle_bin_probs[bin]);
        }
    }
    return acc;
}

double loss_area(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        check_finite(p.area, "loss_area");
        if (p.area < 0.0 || t.area < 0.0) throw NonFiniteInput("loss_area: negative area");
        acc += (t.area - p.area) * (t.area - p.area);
    }
    return weights.lambda_coord * acc;
}

PolarLoss loss_polar_polygon(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    PolarLoss out;
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        if (p.polar_r.size() != t.polar_r.size() || p.polar_theta.size() != t.polar_theta.size() ||
            p.polar_alpha.size() != t.polar_alpha.size())
            throw DimensionMismatch("loss_polar_polygon: sector counts differ");
        for (std::size_t j = 0; j < t.polar_r.size(); ++j) {
            const double ah = p.polar_alpha[j];
            check_finite(ah, "loss_polar_polygon");
            check_finite(p.polar_r[j], "loss_polar_polygon");
            check_finite(p.polar_theta[j], "loss_polar_polygon");
            const double dr = t.polar_r[j] - p.polar_r[j];
            const double dt = t.polar_theta[j] - p.polar_theta[j];
            out.cods += ah * (dr * dr + dt * dt);
            if (t.polar_alpha[j] > 0.0) {
                if (!(ah > 0.0) || ah > 1.0)
                    throw NonFiniteInput("loss_polar_polygon: alpha prediction outside (0, 1]");
                out.mask -= t.polar_alpha[j] * std::log(ah);
            }
        }
    }
    out.total = out.cods + out.mask + loss_xy(pred, target, weights) +
                loss_objectness(pred, target) + loss_class(pred, target);
    return out;
}

double entropy_floor(const Tensor& target) {
    double acc = 0.0;
    for (const CellSlot& t : target.slots) {
        acc -= xlogy(t.objectness, t.objectness) + xlogy(1.0 - t.objectness, 1.0 - t.objectness);
        if (!t.responsible) continue;
        for (double c : t.class_probs) acc -= xlogy(c, c);
        for (double a : t.polar_alpha)
            if (a > 0.0 && a <= 1.0) acc -= a * std::log(a);
    }
    return acc;
}

Tensor loss_xy_gradient(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    Tensor g = make_tensor(pred.grid, pred.n_classes);
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        g.slots[i].x = -2.0 * weights.lambda_coord * (t.x - p.x);
        g.slots[i].y = -2.0 * weights.lambda_coord * (t.y - p.y);
    }
    return g;
}

Tensor loss_wh_gradient(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    Tensor g = make_tensor(pred.grid, pred.n_classes);
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        // d/dp (sqrt(t) - sqrt(p))^2 = -(sqrt(t) - sqrt(p)) / sqrt(p)
        g.slots[i].w = -weights.lambda_coord * (std::sqrt(t.w) - std::sqrt(p.w)) / std::sqrt(p.w);
        g.slots[i].h = -weights.lambda_coord * (std::sqrt(t.h) - std::sqrt(p.h)) / std::sqrt(p.h);
    }
    return g;
}

Tensor loss_area_gradient(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
    check_conformant(pred, target);
    Tensor g = make_tensor(pred.grid, pred.n_classes);
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        g.slots[i].area = -2.0 * weights.lambda_coord * (t.area - pred.slots[i].area);
    }
    return g;
}

Tensor loss_orientation_gradient(const Tensor& pred, const Tensor& target, bool wrapped) {
    check_conformant(pred, target);
    Tensor g = make_tensor(pred.grid, pred.n_classes);
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const double d = wrapped ? wrapped_angle_diff_deg(t.angle_deg, pred.slots[i].angle_deg)
                                 : t.angle_deg - pred.slots[i].angle_deg;
        g.slots[i].angle_deg = -2.0 * d;
    }
    return g;
}

Tensor loss_polar_cods_gradient(const Tensor& pred, const Tensor& target) {
    check_conformant(pred, target);
    Tensor g = make_tensor(pred.grid, pred.n_classes);
    for (std::size_t i = 0; i < target.slots.size(); ++i) {
        const CellSlot& t = target.slots[i];
        if (!t.responsible) continue;
        const CellSlot& p = pred.slots[i];
        auto& gs = g.slots[i];
        gs.polar_r.assign(t.polar_r.size(), 0.0);
        gs.polar_theta.assign(t.polar_theta.size(), 0.0);
        gs.polar_alpha.assign(t.polar_alpha.size(), 0.0);
        for (std::size_t j = 0; j < t.polar_r.size(); ++j) {
            const double dr = t.polar_r[j] - p.polar_r[j];
            const double dt = t.polar_theta[j] - p.polar_theta[j];
            gs.polar_r[j] = -2.0 * p.polar_alpha[j] * dr;
            gs.polar_theta[j] = -2.0 * p.polar_alpha[j] * dt;
            gs.polar_alpha[j] = dr * dr + dt * dt;
        }
    }
    return g;
}

double shape_pair_iou(const Shape& a, const Shape& b) {
    const Contour pa = shape_to_polygon(a, kDefaultArcTolerance);
    const Contour pb = shape_to_polygon(b, kDefaultArcTolerance);
    if (is_convex(pa) && is_convex(pb)) {
        const double inter = convex_intersection_area(pa, pb);
        const double uni = polygon_area(pa) + polygon_area(pb) - inter;
        return uni > 0.0 ? inter / uni : 0.0;
    }
    return shape_pair_iou_mask(a, b);
}

double shape_pair_iou_mask(const Shape& a, const Shape& b, int long_side) {
    const Contour pa = shape_to_polygon(a, kDefaultArcTolerance);
    const Contour pb = shape_to_polygon(b, kDefaultArcTolerance);
    Aabb box = bounding_box(pa);
    const Aabb bb = bounding_box(pb);
    box.min.x = std::min(box.min.x, bb.min.x);
    box.min.y = std::min(box.min.y, bb.min.y);
    box.max.x = std::max(box.max.x, bb.max.x);
    box.max.y = std::max(box.max.y, bb.max.y);
    const double extent = std::max(box.width(), box.height());
    if (extent <= 0.0) return 0.0;
    const double res = long_side / (extent * 1.02);
    const Vec2 origin = box.min - Vec2{extent * 0.01, extent * 0.01};
    const GridSpec2D grid{static_cast<int>(std::ceil(box.width() * res)) + 2,
                          static_cast<int>(std::ceil(box.height() * res)) + 2, res, origin};
    const BinaryMask ma = rasterize_polygon_clipped(pa, grid);
    const BinaryMask mb = rasterize_polygon_clipped(pb, grid);
    try {
        return mask_iou(ma, mb);
    } catch (const BothEmpty&) {
        return 0.0;
    }
}

std::vector<DetectionRecord> nms_generalized(std::span<const DetectionRecord> detections,
                                             double score_thresh, double iou_thresh,
                                             const ShapeIouFn& iou_fn) {
    const ShapeIouFn iou = iou_fn ? iou_fn : ShapeIouFn(shape_pair_iou);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < detections.size(); ++i)
        if (detections[i].confidence >= score_thresh) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].confidence > detections[b].confidence;
    });

    std::vector<DetectionRecord> kept;
    std::vector<bool> removed(detections.size(), false);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        if (removed[i]) continue;
        kept.push_back(detections[i]);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const std::size_t j = order[oj];
            if (removed[j] || detections[j].class_id != detections[i].class_id) continue;
            if (iou(detections[i].shape, detections[j].shape) > iou_thresh) removed[j] = true;
        }
    }
    return kept;
}

}  // namespace fisheye
