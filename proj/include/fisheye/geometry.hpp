#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fisheye/vec.hpp"

namespace fisheye {

// Ordered 2D point loop in pixel coordinates. Orientation is normalized to CCW
// (positive shoelace area) by make_contour / normalize_ccw.
struct Contour {
    std::vector<Vec2> vertices;
    bool closed = true;
};

double signed_area(const Contour& c);
double polygon_area(const Contour& c);
double perimeter(const Contour& c);
Vec2 polygon_centroid(const Contour& c);
bool point_in_polygon(const Contour& c, Vec2 p);
bool is_convex(const Contour& c);

// Rejects proper self-crossings and collinear edge overlaps. Vertex-touching
// contours (as produced by pixel-boundary tracing) are accepted.
bool is_simple_polygon(const Contour& c);

Contour normalize_ccw(Contour c);

// Validating constructor used on annotation ingest: >= 3 vertices, simple,
// output normalized CCW. Throws InvalidContour with `label` in the message.
Contour make_contour(std::vector<Vec2> vertices, const std::string& label = "");

struct Aabb {
    Vec2 min;
    Vec2 max;
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double area() const { return width() * height(); }
};

Aabb bounding_box(std::span<const Vec2> points);
Aabb bounding_box(const Contour& c);

Contour convex_hull(std::span<const Vec2> points);

struct RotatedRect {
    Vec2 center;
    double width = 0.0;   // extent along the angle direction
    double height = 0.0;  // extent along the perpendicular
    double angle_deg = 0.0;  // in [-90, 90)
    double area() const { return width * height; }
};

std::array<Vec2, 4> rect_corners(const RotatedRect& r);

// Minimum-area enclosing rectangle via rotating calipers over the convex hull.
// Angle canonicalized to [-90, 90), ties resolved to the smaller magnitude and
// then the positive angle.
RotatedRect min_area_rect(const Contour& c);

struct EllipseFitResult {
    Vec2 center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle_deg = 0.0;  // major-axis direction, [-90, 90)
};

// Minimum-volume enclosing ellipse (Khachiyan iteration). The result is scaled
// so every input point satisfies the quadratic form <= 1 exactly.
EllipseFitResult min_enclosing_ellipse(const Contour& c, double tolerance = 1e-6,
                                       int max_iterations = 1000);

struct CircleFitResult {
    bool line_fallback = false;
    Vec2 center;            // circle center (unused for line fallback)
    double radius = 0.0;    // circle radius (unused for line fallback)
    Vec2 line_point;        // line fallback: point on the line
    Vec2 line_dir;          // line fallback: unit direction
    std::vector<double> residuals;
    double max_residual() const;
};

// Algebraic least-squares circle (Kasa). Near-collinear inputs fall back to a
// total-least-squares line with perpendicular residuals.
CircleFitResult fit_circle_kasa(std::span<const Vec2> points);

// Maps contour-space coordinates to mask pixels: g = (p - origin) * resolution.
struct GridSpec2D {
    int width = 0;
    int height = 0;
    double resolution = 1.0;  // mask pixels per contour unit
    Vec2 origin{0.0, 0.0};
};

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    bool get(int x, int y) const;
    void set(int x, int y, bool value);
    void fill_row_span(int y, int x_begin, int x_end);  // [x_begin, x_end)
    std::int64_t count() const;
    bool operator==(const BinaryMask&) const = default;

    std::span<const std::uint64_t> words() const { return words_; }
    int word_stride() const { return stride_; }

private:
    int width_ = 0;
    int height_ = 0;
    int stride_ = 0;
    std::vector<std::uint64_t> words_;
};

// Pixel-center even-odd rasterization. The strict variant throws OutOfBounds if
// any vertex maps outside the grid; the clipped variant clips fill spans instead
// (used for fitted shapes that may exceed the image).
BinaryMask rasterize_polygon(const Contour& c, const GridSpec2D& grid);
BinaryMask rasterize_polygon_clipped(const Contour& c, const GridSpec2D& grid);

double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Exact IoU of two convex contours via Sutherland-Hodgman clipping.
double convex_clip_iou(const Contour& a, const Contour& b);
double convex_intersection_area(const Contour& a, const Contour& b);

// N points on the boundary at arc-length spacing perimeter/N, phase at vertex 0.
Contour resample_arclength(const Contour& c, int n);

// Discrete curvature from the circumscribed circle of vertex i and its
// k-neighborhood endpoints; straight or degenerate neighborhoods give 0.
double local_curvature(const Contour& c, std::size_t index, int support = 2);

void write_pgm(const BinaryMask& mask, std::ostream& os);
void write_pgm_file(const BinaryMask& mask, const std::string& path);

}  // namespace fisheye
