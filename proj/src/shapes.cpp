#include "fisheye/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "fisheye/errors.hpp"

namespace fisheye {

std::vector<Vec2> VertexPolygon::absolute_vertices() const {
    std::vector<Vec2> out;
    out.reserve(vertices.size());
    for (const Vec2& v : vertices) out.push_back(origin + v);
    return out;
}

ShapeKind shape_kind(const Shape& s) {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StandardBox>) return ShapeKind::standard_box;
            else if constexpr (std::is_same_v<T, OrientedBox>) return ShapeKind::oriented_box;
            else if constexpr (std::is_same_v<T, EllipseShape>) return ShapeKind::ellipse;
            else if constexpr (std::is_same_v<T, CurvedBox>) return ShapeKind::curved_box;
            else if constexpr (std::is_same_v<T, VertexPolygon>) return ShapeKind::vertex_polygon;
            else return ShapeKind::polar_polygon;
        },
        s);
}

const char* shape_kind_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::standard_box: return "standard_box";
        case ShapeKind::oriented_box: return "oriented_box";
        case ShapeKind::ellipse: return "ellipse";
        case ShapeKind::curved_box: return "curved_box";
        case ShapeKind::vertex_polygon: return "vertex_polygon";
        case ShapeKind::polar_polygon: return "polar_polygon";
    }
    return "unknown";
}

std::array<Vec2, 4> oriented_box_corners(const OrientedBox& b) {
    return rect_corners({b.center, b.width, b.height, b.angle_deg});
}

double shape_area(const Shape& s) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StandardBox>) {
                return v.width * v.height;
            } else if constexpr (std::is_same_v<T, OrientedBox>) {
                return v.width * v.height;
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                return kPi * 0.25 * v.major_axis * v.minor_axis;
            } else if constexpr (std::is_same_v<T, CurvedBox>) {
                if (v.degenerate) return v.degenerate_box.width * v.degenerate_box.height;
                return 0.5 * (v.theta2 - v.theta1) * (v.r2 * v.r2 - v.r1 * v.r1);
            } else if constexpr (std::is_same_v<T, VertexPolygon>) {
                return polygon_area(Contour{v.vertices, true});
            } else {
                const auto verts = polar_polygon_vertices(v);
                return polygon_area(Contour{verts, true});
            }
        },
        s);
}

namespace {

// Segment count so the sagitta of each chord stays within tol for radius r.
int arc_segments(double radius, double sweep, double tol) {
    if (radius <= tol) return 1;
    const double max_step = 2.0 * std::acos(std::max(-1.0, 1.0 - tol / radius));
    if (max_step <= 0.0) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / max_step)));
}

void append_arc(std::vector<Vec2>& out, Vec2 center, double radius, double a_begin, double a_end,
                double tol, bool include_first) {
    const int segs = arc_segments(radius, a_end - a_begin, tol);
    for (int i = include_first ? 0 : 1; i <= segs; ++i) {
        const double a = a_begin + (a_end - a_begin) * i / segs;
        out.push_back(center + unit_from_angle(a) * radius);
    }
}

}  // namespace

Contour shape_to_polygon(const Shape& s, double arc_tolerance) {
    if (!(arc_tolerance > 0.0)) throw DegenerateInput("shape_to_polygon: tolerance must be positive");
    return std::visit(
        [&](const auto& v) -> Contour {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StandardBox>) {
                const double hw = 0.5 * v.width, hh = 0.5 * v.height;
                return Contour{{{v.center.x - hw, v.center.y - hh},
                                {v.center.x + hw, v.center.y - hh},
                                {v.center.x + hw, v.center.y + hh},
                                {v.center.x - hw, v.center.y + hh}},
                               true};
            } else if constexpr (std::is_same_v<T, OrientedBox>) {
                const auto c = oriented_box_corners(v);
                return Contour{{c[0], c[1], c[2], c[3]}, true};
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                const double a = 0.5 * v.major_axis, b = 0.5 * v.minor_axis;
                const int segs = arc_segments(std::max(a, b), 2.0 * kPi, arc_tolerance);
                const int n = std::max(8, segs);
                Contour out;
                out.vertices.reserve(n);
                const double rot = deg_to_rad(v.angle_deg);
                for (int i = 0; i < n; ++i) {
                    const double t = 2.0 * kPi * i / n;
                    const Vec2 p{a * std::cos(t), b * std::sin(t)};
                    out.vertices.push_back(v.center + rotated(p, rot));
                }
                return out;
            } else if constexpr (std::is_same_v<T, CurvedBox>) {
                if (v.degenerate) {
                    const auto c = oriented_box_corners(v.degenerate_box);
                    return Contour{{c[0], c[1], c[2], c[3]}, true};
                }
                std::vector<Vec2> pts;
                append_arc(pts, v.circle_center, v.r1, v.theta1, v.theta2, arc_tolerance, true);
                append_arc(pts, v.circle_center, v.r2, v.theta2, v.theta1, arc_tolerance, true);
                return normalize_ccw(Contour{std::move(pts), true});
            } else if constexpr (std::is_same_v<T, VertexPolygon>) {
                return Contour{v.absolute_vertices(), true};
            } else {
                return Contour{polar_polygon_vertices(v), true};
            }
        },
        s);
}

int param_count(ShapeKind kind, int vertex_or_sector_count) {
    switch (kind) {
        case ShapeKind::standard_box: return 4;
        case ShapeKind::oriented_box: return 5;
        case ShapeKind::ellipse: return 5;
        case ShapeKind::curved_box: return 6;
        case ShapeKind::vertex_polygon: return 2 * vertex_or_sector_count;
        case ShapeKind::polar_polygon: return 3 * vertex_or_sector_count;
    }
    return 0;
}

int param_count(const Shape& s) {
    const ShapeKind kind = shape_kind(s);
    int n = 0;
    if (const auto* p = std::get_if<VertexPolygon>(&s)) n = static_cast<int>(p->vertices.size());
    if (const auto* p = std::get_if<PolarPolygon>(&s)) n = static_cast<int>(p->sectors.size());
    return param_count(kind, n);
}

namespace {

Vec2 median_x_point(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x; });
    const std::size_t n = pts.size();
    if (n % 2 == 1) return pts[n / 2];
    return (pts[n / 2 - 1] + pts[n / 2]) * 0.5;
}

Vec2 bottom_point_of(const std::vector<Vec2>& pts) {
    double max_y = pts[0].y;
    for (const Vec2& p : pts) max_y = std::max(max_y, p.y);
    std::vector<Vec2> bottom;
    for (const Vec2& p : pts)
        if (p.y >= max_y - 1e-9) bottom.push_back(p);
    return median_x_point(std::move(bottom));
}

// True if angle a falls inside [t1, t2] modulo 2*pi.
bool angle_in_range(double a, double t1, double t2) {
    const double span = t2 - t1;
    double d = std::fmod(a - t1, 2.0 * kPi);
    if (d < 0.0) d += 2.0 * kPi;
    return d <= span;
}

}  // namespace

Vec2 footpoint(const Shape& s) {
    return std::visit(
        [](const auto& v) -> Vec2 {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StandardBox>) {
                return {v.center.x, v.center.y + 0.5 * v.height};
            } else if constexpr (std::is_same_v<T, OrientedBox>) {
                const auto c = oriented_box_corners(v);
                return bottom_point_of({c.begin(), c.end()});
            } else if constexpr (std::is_same_v<T, EllipseShape>) {
                const double a = 0.5 * v.major_axis, b = 0.5 * v.minor_axis;
                const double rot = deg_to_rad(v.angle_deg);
                const double sy = a * std::sin(rot), cy = b * std::cos(rot);
                const double k = std::hypot(sy, cy);
                if (k <= 0.0) return v.center;
                const double ct = sy / k, st = cy / k;
                return {v.center.x + std::cos(rot) * a * ct - std::sin(rot) * b * st,
                        v.center.y + k};
            } else if constexpr (std::is_same_v<T, CurvedBox>) {
                if (v.degenerate) return footpoint(Shape{v.degenerate_box});
                std::vector<Vec2> candidates;
                for (double theta : {v.theta1, v.theta2}) {
                    candidates.push_back(v.circle_center + unit_from_angle(theta) * v.r1);
                    candidates.push_back(v.circle_center + unit_from_angle(theta) * v.r2);
                }
                // The outer arc reaches its lowest point where it crosses straight
                // down from the circle center.
                if (angle_in_range(kPi / 2.0, v.theta1, v.theta2)) {
                    candidates.push_back(v.circle_center + Vec2{0.0, v.r2});
                    candidates.push_back(v.circle_center + Vec2{0.0, v.r1});
                }
                return bottom_point_of(candidates);
            } else if constexpr (std::is_same_v<T, VertexPolygon>) {
                return bottom_point_of(v.absolute_vertices());
            } else {
                return bottom_point_of(polar_polygon_vertices(v));
            }
        },
        s);
}

Vec2 curved_box_object_center(const CurvedBox& b) {
    if (b.degenerate) return b.degenerate_box.center;
    const double mean_r = 0.5 * (b.r1 + b.r2);
    const double mean_theta = 0.5 * (b.theta1 + b.theta2);
    return b.circle_center + unit_from_angle(mean_theta) * mean_r;
}

CurvedBox curved_box_from_object_center(Vec2 object_center, double r1, double r2, double theta1,
                                        double theta2) {
    const double mean_r = 0.5 * (r1 + r2);
    const double mean_theta = 0.5 * (theta1 + theta2);
    CurvedBox out;
    out.circle_center = object_center - unit_from_angle(mean_theta) * mean_r;
    out.r1 = r1;
    out.r2 = r2;
    out.theta1 = theta1;
    out.theta2 = theta2;
    return out;
}

std::vector<Vec2> polar_polygon_vertices(const PolarPolygon& p) {
    std::vector<Vec2> out;
    out.reserve(p.sectors.size());
    for (const auto& s : p.sectors)
        if (s.alpha >= 1) out.push_back(p.center + unit_from_angle(s.theta) * s.r);
    return out;
}

Vec2 shape_center(const Shape& s) {
    return std::visit(
        [](const auto& v) -> Vec2 {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StandardBox>) return v.center;
            else if constexpr (std::is_same_v<T, OrientedBox>) return v.center;
            else if constexpr (std::is_same_v<T, EllipseShape>) return v.center;
            else if constexpr (std::is_same_v<T, CurvedBox>) return curved_box_object_center(v);
            else if constexpr (std::is_same_v<T, VertexPolygon>) return v.origin;
            else return v.center;
        },
        s);
}

}  // namespace fisheye
