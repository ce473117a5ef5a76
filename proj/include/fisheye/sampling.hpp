#pragma once

#include <vector>

#include "fisheye/geometry.hpp"
#include "fisheye/shapes.hpp"

namespace fisheye {

// Polar polygon from N rays cast from the centroid at angles i*2*pi/N; r_i is
// the farthest boundary intersection, alpha = 1 per sector. Throws
// CentroidOutside when the centroid is not interior.
PolarPolygon sample_uniform_angular(const Contour& contour, int n);

// Vertices at equal arc-length steps along the contour, stored relative to the
// centroid. Phase starts at vertex 0.
VertexPolygon sample_uniform_perimeter(const Contour& contour, int n);

struct AdaptiveSamplingConfig {
    int target_vertices = 24;
    int min_support = 3;   // region-of-support bounds, in contour points
    int max_support = 15;
    int densify_factor = 16;  // densified points per target vertex (floor 256)
};

// Curvature-adaptive sampling: dominant points from region-of-support curvature
// non-maximum suppression, reduced to exactly N vertices by binary-searching
// the polyline-simplification epsilon; arc-length midpoint insertion pads the
// set when fewer than N dominant points survive.
VertexPolygon sample_adaptive(const Contour& contour, const AdaptiveSamplingConfig& cfg);

// alpha_i = number of polygon vertices whose polar angle about the origin falls
// in sector [i, i+1) * 2*pi/N.
std::vector<int> sector_vertex_counts(const VertexPolygon& poly, int n_sectors);

}  // namespace fisheye
