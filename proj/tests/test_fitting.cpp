#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"

#include "fisheye/errors.hpp"
#include "fisheye/fitting.hpp"

using namespace fisheye;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

Contour random_blob(std::mt19937_64& rng, Vec2 center, double base_radius, int n = 32) {
    Contour c;
    for (int i = 0; i < n; ++i) {
        const double r = base_radius * uniform(rng, 0.55, 1.45);
        c.vertices.push_back(center + unit_from_angle(2.0 * kPi * i / n) * r);
    }
    return c;
}

Contour annular_sector(Vec2 center, double r1, double r2, double t1, double t2, int segs = 48) {
    Contour c;
    for (int i = 0; i <= segs; ++i)
        c.vertices.push_back(center + unit_from_angle(t1 + (t2 - t1) * i / segs) * r1);
    for (int i = segs; i >= 0; --i)
        c.vertices.push_back(center + unit_from_angle(t1 + (t2 - t1) * i / segs) * r2);
    return normalize_ccw(c);
}

double shape_mask_iou(const Shape& shape, const BinaryMask& gt, const GridSpec2D& grid) {
    return mask_iou(rasterize_polygon_clipped(shape_to_polygon(shape, kDefaultArcTolerance), grid),
                    gt);
}

}  // namespace

TEST_CASE("fit_standard_box on a square and a sliver") {
    const Contour square{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}, true};
    const StandardBox box = fit_standard_box(square);
    CHECK(box.center == Vec2{1, 1});
    CHECK(box.width == 2.0);
    CHECK(box.height == 2.0);

    const Contour sliver{{{0, 0}, {10, 0.2}, {10, 0.6}, {0, 0.4}}, true};
    const StandardBox sbox = fit_standard_box(sliver);
    CHECK(sbox.width == 10.0);
    CHECK(sbox.height == doctest::Approx(0.6));
}

TEST_CASE("fit_standard_box is strictly larger than a rotated rectangle") {
    Contour rect{{{-3, -1}, {3, -1}, {3, 1}, {-3, 1}}, true};
    for (auto& v : rect.vertices) v = rotated(v, deg_to_rad(25.0));
    const StandardBox box = fit_standard_box(rect);
    CHECK(box.width * box.height > polygon_area(rect) + 1e-9);
}

TEST_CASE("fit_oriented_box canonical angles") {
    const Contour square{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}, true};
    CHECK(fit_oriented_box(square).angle_deg == doctest::Approx(0.0));

    Contour rotated45 = square;
    for (auto& v : rotated45.vertices) v = rotated(v, deg_to_rad(45.0));
    // Tie between +45 and -45 resolves to the positive angle.
    CHECK(fit_oriented_box(rotated45).angle_deg == doctest::Approx(45.0));
}

TEST_CASE("oriented box IoU beats the standard box on random blobs") {
    std::mt19937_64 rng(77);
    const GridSpec2D grid{256, 256};
    for (int trial = 0; trial < 50; ++trial) {
        const Contour blob = random_blob(rng, {128, 128}, uniform(rng, 30, 70));
        // Both fits enclose the contour, so the analytic IoU ordering reduces
        // to the area comparison; the min-area rectangle can only be smaller.
        const StandardBox sb = fit_standard_box(blob);
        const OrientedBox ob = fit_oriented_box(blob);
        CHECK(ob.width * ob.height <= sb.width * sb.height + 1e-9);

        const BinaryMask gt = rasterize_polygon_clipped(blob, grid);
        const double iou_std = shape_mask_iou(Shape{sb}, gt, grid);
        const CurvedBoxFit curved = fit_curved_box(blob, gt);
        // The curved search scores both box fits as degenerate candidates, so
        // its IoU dominates the standard box by construction.
        CHECK(curved.iou >= iou_std);
    }
}

TEST_CASE("fit_ellipse matches circular and capsule contours") {
    Contour circle;
    for (int i = 0; i < 64; ++i) circle.vertices.push_back(unit_from_angle(2 * kPi * i / 64) * 7.0);
    const EllipseShape e = fit_ellipse(circle);
    CHECK(e.major_axis == doctest::Approx(14.0).epsilon(1e-3));
    CHECK(e.minor_axis == doctest::Approx(14.0).epsilon(1e-3));

    const Contour square{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, true};
    const EllipseShape es = fit_ellipse(square);
    CHECK(es.major_axis == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));
    CHECK(es.minor_axis == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));

    // Capsule along a known axis: the fitted major axis aligns within a degree.
    const double axis_deg = 30.0;
    Contour capsule;
    for (int i = 0; i <= 24; ++i)
        capsule.vertices.push_back(Vec2{8, 0} + unit_from_angle(-kPi / 2 + kPi * i / 24) * 2.0);
    for (int i = 0; i <= 24; ++i)
        capsule.vertices.push_back(Vec2{-8, 0} + unit_from_angle(kPi / 2 + kPi * i / 24) * 2.0);
    for (auto& v : capsule.vertices) v = rotated(v, deg_to_rad(axis_deg));
    const EllipseShape ec = fit_ellipse(capsule);
    CHECK(std::abs(std::remainder(ec.angle_deg - axis_deg, 180.0)) < 1.0);
}

TEST_CASE("enclosure: box, oriented box and ellipse contain the contour") {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 20; ++trial) {
        const Contour blob = random_blob(rng, {0, 0}, 20.0);
        const StandardBox sb = fit_standard_box(blob);
        const OrientedBox ob = fit_oriented_box(blob);
        const EllipseShape el = fit_ellipse(blob);

        const Vec2 u = unit_from_angle(deg_to_rad(ob.angle_deg));
        const Vec2 v = perp(u);
        const double ca = std::cos(deg_to_rad(el.angle_deg));
        const double sa = std::sin(deg_to_rad(el.angle_deg));
        for (const Vec2& p : blob.vertices) {
            CHECK(std::abs(p.x - sb.center.x) <= sb.width / 2 + 1e-9);
            CHECK(std::abs(p.y - sb.center.y) <= sb.height / 2 + 1e-9);
            CHECK(std::abs(dot(p - ob.center, u)) <= ob.width / 2 + 1e-9);
            CHECK(std::abs(dot(p - ob.center, v)) <= ob.height / 2 + 1e-9);
            const Vec2 d = p - el.center;
            const double x = ca * d.x + sa * d.y;
            const double y = -sa * d.x + ca * d.y;
            const double q = x * x / (0.25 * el.major_axis * el.major_axis) +
                             y * y / (0.25 * el.minor_axis * el.minor_axis);
            CHECK(q <= 1.0 + 1e-4);
        }
    }
}

TEST_CASE("curved box recovers an exact annular sector") {
    const Contour sector = annular_sector({120, -40}, 160, 200, deg_to_rad(60), deg_to_rad(120));
    const Aabb bb = bounding_box(sector);
    Contour shifted = sector;
    for (auto& v : shifted.vertices) v = v - bb.min + Vec2{10, 10};
    const GridSpec2D grid{static_cast<int>(bb.width()) + 20, static_cast<int>(bb.height()) + 20};
    const BinaryMask gt = rasterize_polygon_clipped(shifted, grid);

    CurvedBoxSearchConfig cfg;
    cfg.radius_rule = CurvedRadiusRule::extent;
    const CurvedBoxFit fit = fit_curved_box(shifted, gt, cfg);
    CHECK(!fit.box.degenerate);
    CHECK(fit.iou >= 0.98);
}

TEST_CASE("curved box degenerates to the oriented box on a rectangle") {
    const Contour rect{{{10, 10}, {90, 10}, {90, 40}, {10, 40}}, true};
    const GridSpec2D grid{100, 50};
    const BinaryMask gt = rasterize_polygon_clipped(rect, grid);
    const CurvedBoxFit fit = fit_curved_box(rect, gt);
    CHECK(fit.box.degenerate);
    CHECK(fit.iou == doctest::Approx(1.0));
}

TEST_CASE("curved box never loses to the oriented box") {
    std::mt19937_64 rng(79);
    const GridSpec2D grid{256, 256};
    for (int trial = 0; trial < 30; ++trial) {
        const Contour blob = random_blob(rng, {128, 128}, uniform(rng, 25, 60));
        const BinaryMask gt = rasterize_polygon_clipped(blob, grid);
        const double iou_oriented = shape_mask_iou(Shape{fit_oriented_box(blob)}, gt, grid);
        const CurvedBoxFit fit = fit_curved_box(blob, gt);
        CHECK(fit.iou >= iou_oriented - 1e-12);
    }
}

TEST_CASE("fits are deterministic") {
    std::mt19937_64 rng(80);
    const Contour blob = random_blob(rng, {128, 128}, 40.0);
    const GridSpec2D grid{256, 256};
    const BinaryMask gt = rasterize_polygon_clipped(blob, grid);

    const OrientedBox a = fit_oriented_box(blob);
    const OrientedBox b = fit_oriented_box(blob);
    CHECK(std::memcmp(&a, &b, sizeof(OrientedBox)) == 0);

    const CurvedBoxFit f1 = fit_curved_box(blob, gt);
    const CurvedBoxFit f2 = fit_curved_box(blob, gt);
    CHECK(f1.iou == f2.iou);
    CHECK(f1.box.degenerate == f2.box.degenerate);
    CHECK(f1.box.circle_center == f2.box.circle_center);
    CHECK(f1.box.r1 == f2.box.r1);
    CHECK(f1.box.r2 == f2.box.r2);
    CHECK(f1.box.theta1 == f2.box.theta1);
    CHECK(f1.box.theta2 == f2.box.theta2);
}

TEST_CASE("degenerate contours are rejected") {
    CHECK_THROWS_AS(fit_standard_box(Contour{{{0, 0}, {1, 1}}, true}), DegenerateInput);
    CHECK_THROWS_AS(fit_oriented_box(Contour{{{0, 0}, {1, 1}, {2, 2}}, true}), DegenerateInput);
}
