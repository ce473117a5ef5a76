#include "fisheye/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fisheye/errors.hpp"

namespace fisheye {

StandardBox fit_standard_box(const Contour& contour) {
    if (contour.vertices.size() < 3) throw DegenerateInput("fit_standard_box: degenerate contour");
    const Aabb box = bounding_box(contour);
    return {{0.5 * (box.min.x + box.max.x), 0.5 * (box.min.y + box.max.y)},
            box.width(), box.height()};
}

OrientedBox fit_oriented_box(const Contour& contour) {
    const RotatedRect r = min_area_rect(contour);
    return {r.center, r.width, r.height, r.angle_deg};
}

EllipseShape fit_ellipse(const Contour& contour) {
    const EllipseFitResult e = min_enclosing_ellipse(contour);
    return {e.center, 2.0 * e.semi_major, 2.0 * e.semi_minor, e.angle_deg};
}

namespace {

// Wraps an angle into (-pi, pi].
double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

CurvedBox annular_sector_through(std::span<const Vec2> points, Vec2 anchor, Vec2 circle_center,
                                 const OrientedBox& ob) {
    double r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
    for (const Vec2& p : points) {
        const double d = distance(p, circle_center);
        r_min = std::min(r_min, d);
        r_max = std::max(r_max, d);
    }
    const double ref = std::atan2(anchor.y - circle_center.y, anchor.x - circle_center.x);
    double lo = 0.0, hi = 0.0;
    for (const Vec2& p : points) {
        const double a = std::atan2(p.y - circle_center.y, p.x - circle_center.x);
        const double d = wrap_angle(a - ref);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CurvedBox out;
    out.circle_center = circle_center;
    out.r1 = r_min;
    out.r2 = r_max;
    out.theta1 = ref + lo;
    out.theta2 = ref + hi;
    out.degenerate_box = ob;
    return out;
}

// Two radius rules per candidate center: circles through the oriented box's
// corner pairs, and circles spanning the contour's own radial extent. The
// second recovers exact annular sectors; the first matches flat-sided blobs.
CurvedBox curved_box_from_center(const OrientedBox& ob, Vec2 circle_center) {
    const auto corners = oriented_box_corners(ob);
    return annular_sector_through(std::span<const Vec2>(corners.data(), corners.size()),
                                  ob.center, circle_center, ob);
}

CurvedBox curved_box_from_contour_extent(const Contour& contour, const OrientedBox& ob,
                                         Vec2 circle_center) {
    return annular_sector_through(contour.vertices, ob.center, circle_center, ob);
}

}  // namespace

CurvedBoxFit fit_curved_box(const Contour& contour, const BinaryMask& instance_mask,
                            const CurvedBoxSearchConfig& cfg) {
    if (cfg.n_center_candidates < 2)
        throw DegenerateInput("fit_curved_box: need at least 2 center candidates");
    const OrientedBox ob = fit_oriented_box(contour);

    const GridSpec2D grid{instance_mask.width(), instance_mask.height(),
                          cfg.iou_grid_resolution, {0.0, 0.0}};

    // The circle center slides along the box's cross-length symmetry axis (the
    // perpendicular bisector of the long edges): an annular sector's center is
    // equidistant from the two near corners and from the two far corners.
    const double angle = deg_to_rad(ob.angle_deg);
    const Vec2 width_dir = unit_from_angle(angle);
    const Vec2 height_dir = perp(width_dir);
    const bool width_is_long = ob.width >= ob.height;
    const Vec2 axis = width_is_long ? height_dir : width_dir;
    const double short_extent = width_is_long ? ob.height : ob.width;

    const double diag = std::hypot(ob.width, ob.height);
    const double max_dist = cfg.max_center_distance > 0.0 ? cfg.max_center_distance : 8.0 * diag;
    const double min_dist = 0.52 * short_extent;

    // Degenerate (center at infinity) candidates first: the min-area rectangle
    // and the axis-aligned box, which the oriented family contains as the
    // zero-angle case. Scoring both keeps the curved result from ever losing
    // to either box fit on the pixel grid.
    const StandardBox sb = fit_standard_box(contour);
    CurvedBox best_box;
    best_box.degenerate = true;
    best_box.degenerate_box = ob;
    double best_iou = -1.0;
    for (const OrientedBox& degenerate :
         {ob, OrientedBox{sb.center, sb.width, sb.height, 0.0}}) {
        CurvedBox cand;
        cand.degenerate = true;
        cand.degenerate_box = degenerate;
        const BinaryMask m = rasterize_polygon_clipped(
            shape_to_polygon(Shape{cand}, cfg.arc_tolerance), grid);
        double iou = 0.0;
        try {
            iou = mask_iou(m, instance_mask);
        } catch (const BothEmpty&) {
            iou = 0.0;
        }
        if (iou > best_iou) {
            best_iou = iou;
            best_box = cand;
        }
    }

    if (max_dist > min_dist) {
        const double log_lo = std::log(min_dist);
        const double log_hi = std::log(max_dist);
        for (int side = -1; side <= 1; side += 2) {
            for (int k = 0; k < cfg.n_center_candidates; ++k) {
                const double s = std::exp(log_lo + (log_hi - log_lo) * k /
                                          (cfg.n_center_candidates - 1));
                const Vec2 center = ob.center + axis * (side * s);
                std::vector<CurvedBox> cands;
                if (cfg.radius_rule != CurvedRadiusRule::extent)
                    cands.push_back(curved_box_from_center(ob, center));
                if (cfg.radius_rule != CurvedRadiusRule::corner)
                    cands.push_back(curved_box_from_contour_extent(contour, ob, center));
                for (const CurvedBox& cand : cands) {
                    if (cand.r2 - cand.r1 < 1e-9) continue;
                    if (cand.theta2 - cand.theta1 >= 2.0 * kPi - 1e-9) continue;
                    const Contour poly = shape_to_polygon(Shape{cand}, cfg.arc_tolerance);
                    const BinaryMask m = rasterize_polygon_clipped(poly, grid);
                    double iou;
                    try {
                        iou = mask_iou(m, instance_mask);
                    } catch (const BothEmpty&) {
                        continue;
                    }
                    if (iou > best_iou) {
                        best_iou = iou;
                        best_box = cand;
                    }
                }
            }
        }
    }
    return {best_box, best_iou};
}

}  // namespace fisheye
