#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "fisheye/errors.hpp"
#include "fisheye/geometry.hpp"

using namespace fisheye;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

Contour regular_polygon(Vec2 center, double radius, int n, double phase = 0.0) {
    Contour c;
    for (int i = 0; i < n; ++i)
        c.vertices.push_back(center + unit_from_angle(phase + 2.0 * kPi * i / n) * radius);
    return c;
}

// Independent containment oracle for convex CCW polygons.
bool inside_convex(const Contour& hull, Vec2 p, double eps = 1e-9) {
    const auto& v = hull.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % v.size()];
        if (cross(b - a, p - a) < -eps) return false;
    }
    return true;
}

Contour random_blob(std::mt19937_64& rng, Vec2 center, double base_radius, int n = 24) {
    Contour c;
    for (int i = 0; i < n; ++i) {
        const double r = base_radius * uniform(rng, 0.6, 1.4);
        c.vertices.push_back(center + unit_from_angle(2.0 * kPi * i / n) * r);
    }
    return c;
}

}  // namespace

TEST_CASE("convex hull of square plus center point is the square") {
    std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
    const Contour hull = convex_hull(pts);
    CHECK(hull.vertices.size() == 4);
    for (const Vec2& corner : {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}})
        CHECK(std::count(hull.vertices.begin(), hull.vertices.end(), corner) == 1);
}

TEST_CASE("convex hull keeps an already convex point set") {
    const Contour hexagon = regular_polygon({3, 2}, 2.0, 6);
    const Contour hull = convex_hull(hexagon.vertices);
    CHECK(hull.vertices.size() == 6);
    for (const Vec2& v : hexagon.vertices)
        CHECK(std::count(hull.vertices.begin(), hull.vertices.end(), v) == 1);
}

TEST_CASE("convex hull contains every input point") {
    std::mt19937_64 rng(42);
    std::vector<Vec2> pts;
    for (int i = 0; i < 100; ++i) {
        const double a = uniform(rng, 0, 2 * kPi);
        const double r = std::sqrt(uniform(rng, 0, 1)) * 10.0;
        pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const Contour hull = convex_hull(pts);
    CHECK(is_convex(hull));
    for (const Vec2& p : pts) CHECK(inside_convex(hull, p));
}

TEST_CASE("convex hull rejects collinear input") {
    std::vector<Vec2> pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    CHECK_THROWS_AS(convex_hull(pts), DegenerateInput);
}

TEST_CASE("min_area_rect recovers a rotated unit square") {
    Contour square = regular_polygon({0, 0}, std::sqrt(0.5), 4, kPi / 4.0);  // unit square
    for (auto& v : square.vertices) v = rotated(v, deg_to_rad(30.0));
    const RotatedRect r = min_area_rect(square);
    CHECK(r.area() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.angle_deg == doctest::Approx(30.0).epsilon(1e-6));
}

TEST_CASE("min_area_rect of a triangle has twice its area") {
    const Contour tri{{{0, 0}, {4, 1}, {1, 3}}, true};
    const RotatedRect r = min_area_rect(tri);
    CHECK(r.area() == doctest::Approx(2.0 * polygon_area(tri)).epsilon(1e-9));
}

TEST_CASE("min_area_rect beats the axis-aligned box and matches a brute-force sweep") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 12; ++i)
            pts.push_back({uniform(rng, -5, 5), uniform(rng, -3, 3)});
        const Contour hull = convex_hull(pts);
        const RotatedRect r = min_area_rect(hull);
        const Aabb aabb = bounding_box(hull);
        CHECK(r.area() <= aabb.area() + 1e-9);

        // 0.1-degree sweep oracle.
        double sweep_best = 1e300;
        for (double deg = 0.0; deg < 90.0; deg += 0.1) {
            const Vec2 u = unit_from_angle(deg_to_rad(deg));
            const Vec2 v = perp(u);
            double lo_u = 1e300, hi_u = -1e300, lo_v = 1e300, hi_v = -1e300;
            for (const Vec2& p : hull.vertices) {
                lo_u = std::min(lo_u, dot(u, p));
                hi_u = std::max(hi_u, dot(u, p));
                lo_v = std::min(lo_v, dot(v, p));
                hi_v = std::max(hi_v, dot(v, p));
            }
            sweep_best = std::min(sweep_best, (hi_u - lo_u) * (hi_v - lo_v));
        }
        CHECK(r.area() <= sweep_best + 1e-9);
        CHECK(sweep_best <= r.area() * 1.001);
    }
}

TEST_CASE("min_enclosing_ellipse of circle samples is that circle") {
    const Contour circle = regular_polygon({2, -1}, 3.0, 40);
    const EllipseFitResult e = min_enclosing_ellipse(circle);
    CHECK(e.semi_major == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(e.semi_minor == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(e.center.x == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(e.center.y == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("min_enclosing_ellipse of a square is the circumscribed circle") {
    const Contour square{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, true};
    const EllipseFitResult e = min_enclosing_ellipse(square);
    CHECK(e.semi_major == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    CHECK(e.semi_minor == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("min_enclosing_ellipse encloses all points and is reasonably small") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 30; ++i)
            pts.push_back({uniform(rng, -4, 4), uniform(rng, -2, 2)});
        const Contour hull = convex_hull(pts);
        const EllipseFitResult e = min_enclosing_ellipse(hull);
        // Containment within the (1 + 1e-4) scale margin.
        const double cos_a = std::cos(deg_to_rad(e.angle_deg));
        const double sin_a = std::sin(deg_to_rad(e.angle_deg));
        for (const Vec2& p : pts) {
            const Vec2 d = p - e.center;
            const double x = cos_a * d.x + sin_a * d.y;
            const double y = -sin_a * d.x + cos_a * d.y;
            const double q = (x / e.semi_major) * (x / e.semi_major) +
                             (y / e.semi_minor) * (y / e.semi_minor);
            CHECK(q <= 1.0 + 1e-4);
        }
        // Not larger than the ellipse circumscribing the min-area rect.
        const RotatedRect r = min_area_rect(hull);
        const double circumscribed_area = kPi * r.width * r.height / 2.0;
        CHECK(kPi * e.semi_major * e.semi_minor <= circumscribed_area * (1.0 + 1e-3));
    }
}

TEST_CASE("fit_circle_kasa on exact circle samples") {
    const Contour circle = regular_polygon({5, 7}, 12.0, 36);
    const CircleFitResult fit = fit_circle_kasa(circle.vertices);
    REQUIRE(!fit.line_fallback);
    CHECK(fit.radius == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(fit.max_residual() < 1e-9);
}

TEST_CASE("fit_circle_kasa falls back to a line for collinear points") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({static_cast<double>(i), 2.0 * i + 1.0});
    const CircleFitResult fit = fit_circle_kasa(pts);
    REQUIRE(fit.line_fallback);
    CHECK(fit.max_residual() < 1e-9);
}

TEST_CASE("fit_circle_kasa is robust to small noise") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec2> pts;
        for (int i = 0; i < 64; ++i) {
            const double a = 2.0 * kPi * i / 64;
            const double r = 40.0 + uniform(rng, -0.1, 0.1);
            pts.push_back({r * std::cos(a), r * std::sin(a)});
        }
        const CircleFitResult fit = fit_circle_kasa(pts);
        REQUIRE(!fit.line_fallback);
        worst = std::max(worst, std::abs(fit.radius - 40.0));
    }
    CHECK(worst < 0.2);
}

TEST_CASE("rasterize_polygon fills an integer square exactly") {
    const Contour square{{{2, 3}, {12, 3}, {12, 13}, {2, 13}}, true};
    const BinaryMask mask = rasterize_polygon(square, {20, 20});
    CHECK(mask.count() == 100);
}

TEST_CASE("rasterize_polygon of a zero-area loop is empty") {
    const Contour sliver{{{1, 1}, {5, 5}, {3, 3}}, true};
    const BinaryMask mask = rasterize_polygon(sliver, {8, 8});
    CHECK(mask.count() == 0);
}

TEST_CASE("rasterize_polygon matches the pixel-center oracle on a triangle") {
    const Contour tri{{{0, 0}, {10, 0}, {0, 10}}, true};
    const BinaryMask mask = rasterize_polygon(tri, {12, 12});
    std::int64_t oracle = 0;
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) {
            const Vec2 c{x + 0.5, y + 0.5};
            const bool inside = c.x > 0 && c.y > 0 && c.x + c.y < 10.0;
            if (inside) ++oracle;
            CHECK(mask.get(x, y) == inside);
        }
    }
    CHECK(mask.count() == oracle);
    CHECK(std::abs(static_cast<double>(mask.count()) - 50.0) <= perimeter(tri));
}

TEST_CASE("rasterize_polygon enforces grid bounds") {
    const Contour tri{{{-1, 0}, {5, 0}, {0, 5}}, true};
    CHECK_THROWS_AS(rasterize_polygon(tri, {8, 8}), OutOfBounds);
    CHECK_NOTHROW(rasterize_polygon_clipped(tri, {8, 8}));
}

TEST_CASE("mask_iou basics") {
    const Contour a{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, true};
    const GridSpec2D grid{20, 20};
    const BinaryMask ma = rasterize_polygon(a, grid);
    CHECK(mask_iou(ma, ma) == 1.0);

    const Contour b{{{12, 12}, {18, 12}, {18, 18}, {12, 18}}, true};
    const BinaryMask mb = rasterize_polygon(b, grid);
    CHECK(mask_iou(ma, mb) == 0.0);
    CHECK(mask_iou(ma, mb) == mask_iou(mb, ma));

    const Contour c{{{5, 0}, {15, 0}, {15, 10}, {5, 10}}, true};
    const BinaryMask mc = rasterize_polygon(c, grid);
    CHECK(mask_iou(ma, mc) == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(mask_iou(ma, BinaryMask(10, 10)), DimensionMismatch);
    CHECK_THROWS_AS(mask_iou(BinaryMask(20, 20), BinaryMask(20, 20)), BothEmpty);
}

TEST_CASE("convex_clip_iou basics") {
    const Contour a{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true};
    CHECK(convex_clip_iou(a, a) == doctest::Approx(1.0));
    const Contour b{{{0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1}}, true};
    CHECK(convex_clip_iou(a, b) == doctest::Approx(1.0 / 3.0));
    const Contour bowtieish{{{0, 0}, {2, 1}, {0, 1}, {2, 0}}, true};
    CHECK_THROWS_AS(convex_clip_iou(a, bowtieish), NonConvexInput);
}

TEST_CASE("convex_clip_iou agrees with rasterized IoU") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Vec2> pa, pb;
        for (int i = 0; i < 10; ++i) {
            pa.push_back({uniform(rng, 50, 350), uniform(rng, 50, 350)});
            pb.push_back({uniform(rng, 100, 420), uniform(rng, 100, 420)});
        }
        const Contour ha = convex_hull(pa);
        const Contour hb = convex_hull(pb);
        const double analytic = convex_clip_iou(ha, hb);
        const GridSpec2D grid{512, 512};
        const double raster = [&] {
            const BinaryMask ma = rasterize_polygon_clipped(ha, grid);
            const BinaryMask mb = rasterize_polygon_clipped(hb, grid);
            return mask_iou(ma, mb);
        }();
        CHECK(std::abs(analytic - raster) < 0.02);
    }
}

TEST_CASE("resample_arclength on a square starting at a corner") {
    const Contour square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true};
    const Contour r = resample_arclength(square, 4);
    REQUIRE(r.vertices.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r.vertices[i].x == doctest::Approx(square.vertices[i].x));
        CHECK(r.vertices[i].y == doctest::Approx(square.vertices[i].y));
    }
}

TEST_CASE("resample_arclength is the identity on a regular polygon") {
    const Contour hexagon = regular_polygon({0, 0}, 2.0, 6);
    const Contour r = resample_arclength(hexagon, 6);
    REQUIRE(r.vertices.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(distance(r.vertices[i], hexagon.vertices[i]) < 1e-12);
}

TEST_CASE("resample_arclength spaces circle samples uniformly") {
    const Contour circle = regular_polygon({0, 0}, 10.0, 720);
    const Contour r = resample_arclength(circle, 24);
    REQUIRE(r.vertices.size() == 24);
    const double expected = distance(r.vertices[0], r.vertices[1]);
    for (std::size_t i = 0; i < 24; ++i) {
        const double d = distance(r.vertices[i], r.vertices[(i + 1) % 24]);
        CHECK(std::abs(d - expected) < 1e-6);
    }
}

TEST_CASE("resample_arclength preserves perimeter on smooth contours") {
    const Contour circle = regular_polygon({0, 0}, 10.0, 720);
    for (int n : {24, 48, 96}) {
        const Contour r = resample_arclength(circle, n);
        CHECK(perimeter(r) >= perimeter(circle) * 0.99);
        CHECK(perimeter(r) <= perimeter(circle) * 1.01);
    }
}

TEST_CASE("local_curvature is zero on straight runs and 1/r on circles") {
    Contour line;
    for (int i = 0; i < 32; ++i) line.vertices.push_back({static_cast<double>(i), 3.0});
    CHECK(local_curvature(line, 10) == 0.0);

    const double radius = 25.0;
    const Contour circle = regular_polygon({0, 0}, radius, 512);
    const double k = local_curvature(circle, 100, 3);
    CHECK(k == doctest::Approx(1.0 / radius).epsilon(0.05));
}

TEST_CASE("local_curvature peaks at corners") {
    const Contour square{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, true};
    const Contour dense = resample_arclength(square, 80);
    // Vertex 0 is a corner; vertex 10 sits mid-edge.
    CHECK(local_curvature(dense, 0) > local_curvature(dense, 10));
}

TEST_CASE("simple polygon validation") {
    const Contour square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true};
    CHECK(is_simple_polygon(square));
    const Contour bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, true};
    CHECK(!is_simple_polygon(bowtie));
    CHECK_THROWS_AS(make_contour({{0, 0}, {1, 1}}), InvalidContour);
    CHECK_THROWS_AS(make_contour({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidContour);
}

TEST_CASE("make_contour normalizes orientation to CCW") {
    const Contour c = make_contour({{0, 0}, {0, 1}, {1, 1}, {1, 0}});  // clockwise input
    CHECK(signed_area(c) > 0.0);
}

TEST_CASE("min_area_rect area never exceeds the AABB on random blobs") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        const Contour blob = random_blob(rng, {0, 0}, 10.0);
        const RotatedRect r = min_area_rect(blob);
        CHECK(r.area() <= bounding_box(blob).area() + 1e-9);
    }
}
