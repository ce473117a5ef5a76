#pragma once

#include <span>
#include <string>

#include "fisheye/annotations.hpp"

namespace fisheye {

struct OverlayStyle {
    double stroke_width = 1.2;
    bool draw_contours = true;
};

// SVG 1.1 document with one color-coded layer per representation; curved boxes
// use true circular-arc path segments. Output bytes are deterministic.
std::string render_overlay(const AnnotatedImage& image, std::span<const std::string> rep_keys,
                           const OverlayStyle& style = {});

// Debug view of projected polylines (open-cube renders).
std::string render_curves_svg(Vec2 image_size, const std::vector<std::vector<Vec2>>& curves);

}  // namespace fisheye
