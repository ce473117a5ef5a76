#pragma once

#include <variant>
#include <vector>

#include "fisheye/geometry.hpp"
#include "fisheye/vec.hpp"

namespace fisheye {

// Default discretization tolerance shared by fitting and evaluation so both
// score identical polygons.
inline constexpr double kDefaultArcTolerance = 0.25;

enum class ShapeKind {
    standard_box,
    oriented_box,
    ellipse,
    curved_box,
    vertex_polygon,
    polar_polygon,
};

struct StandardBox {
    Vec2 center;
    double width = 0.0;
    double height = 0.0;
};

struct OrientedBox {
    Vec2 center;
    double width = 0.0;
    double height = 0.0;
    double angle_deg = 0.0;  // [-90, 90)
};

// Axis lengths are full extents, mirroring the oriented-box field layout.
struct EllipseShape {
    Vec2 center;
    double major_axis = 0.0;
    double minor_axis = 0.0;
    double angle_deg = 0.0;
};

// Annular sector between two concentric circles, bounded by radial segments at
// theta1/theta2. The degenerate flag marks the oriented-box limit (circle
// center at infinity) without encoding infinities in the numeric fields.
struct CurvedBox {
    Vec2 circle_center;
    double r1 = 0.0;  // r1 < r2
    double r2 = 0.0;
    double theta1 = 0.0;  // radians, theta1 < theta2, theta2 - theta1 < 2*pi
    double theta2 = 0.0;
    bool degenerate = false;
    OrientedBox degenerate_box;
};

enum class PolygonSampling { uniform_perimeter, adaptive };

struct VertexPolygon {
    Vec2 origin;                 // object centroid
    std::vector<Vec2> vertices;  // relative to origin
    PolygonSampling sampling = PolygonSampling::uniform_perimeter;

    std::vector<Vec2> absolute_vertices() const;
};

// Per-sector polar encoding: radius, angle within the sector, and alpha = the
// number of source vertices that fell in the sector.
struct PolarPolygon {
    struct Sector {
        double r = 0.0;
        double theta = 0.0;  // radians, within [i, i+1) * 2*pi/N for sector i
        int alpha = 0;
    };

    Vec2 center;
    std::vector<Sector> sectors;
};

using Shape = std::variant<StandardBox, OrientedBox, EllipseShape, CurvedBox, VertexPolygon,
                           PolarPolygon>;

ShapeKind shape_kind(const Shape& s);
const char* shape_kind_name(ShapeKind k);

double shape_area(const Shape& s);

// Polygonal discretization with Hausdorff distance to the true boundary within
// arc_tolerance; boxes come back as exact 4-gons.
Contour shape_to_polygon(const Shape& s, double arc_tolerance);

// Number of regression parameters: boxes 4/5, ellipse 5, curved 6, vertex
// polygon 2 per vertex, polar polygon 3 per sector.
int param_count(ShapeKind kind, int vertex_or_sector_count = 0);
int param_count(const Shape& s);

// Bottom-most boundary point (max image y), ties broken by median x.
Vec2 footpoint(const Shape& s);

std::array<Vec2, 4> oriented_box_corners(const OrientedBox& b);

// Object-center reparameterization of the curved box: the midpoint of the mean
// radius at the mean angle.
Vec2 curved_box_object_center(const CurvedBox& b);
CurvedBox curved_box_from_object_center(Vec2 object_center, double r1, double r2, double theta1,
                                        double theta2);

// Reconstruction: one vertex per sector with alpha >= 1.
std::vector<Vec2> polar_polygon_vertices(const PolarPolygon& p);

Vec2 shape_center(const Shape& s);

}  // namespace fisheye
