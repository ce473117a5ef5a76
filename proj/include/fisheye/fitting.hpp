#pragma once

#include "fisheye/geometry.hpp"
#include "fisheye/shapes.hpp"

namespace fisheye {

StandardBox fit_standard_box(const Contour& contour);

// Minimum-area enclosing rectangle; angle canonicalized to [-90, 90).
OrientedBox fit_oriented_box(const Contour& contour);

// Minimum enclosing ellipse; every contour vertex is inside within a 1e-4
// relative scale margin.
EllipseShape fit_ellipse(const Contour& contour);

// How candidate circle radii are derived for each candidate center. The corner
// rule (circles through the oriented box's corner pairs) is the constrained
// construction whose two curved sides add area beyond the object; the extent
// rule spans the contour's own radial range and can reproduce exact annular
// sectors.
enum class CurvedRadiusRule { corner, extent, both };

struct CurvedBoxSearchConfig {
    int n_center_candidates = 64;      // log-spaced candidates per axis side
    double max_center_distance = 0.0;  // pixels; <= 0 means 8x the box diagonal
    double iou_grid_resolution = 1.0;  // mask pixels per contour unit
    double arc_tolerance = kDefaultArcTolerance;
    CurvedRadiusRule radius_rule = CurvedRadiusRule::corner;
};

struct CurvedBoxFit {
    CurvedBox box;
    double iou = 0.0;  // against the instance mask, at the search grid
};

// Curved-box search: enumerate circle centers along the oriented box's long
// axis (both sides, log-spaced) plus the at-infinity candidate, build the two
// concentric circles through the box's short-edge corner pairs, and keep the
// annular sector with the best mask IoU. The degenerate candidate is scored
// first, so the result never loses to the oriented box.
CurvedBoxFit fit_curved_box(const Contour& contour, const BinaryMask& instance_mask,
                            const CurvedBoxSearchConfig& cfg = {});

}  // namespace fisheye
