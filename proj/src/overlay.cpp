#include "fisheye/overlay.hpp"

#include <cstdio>
#include <sstream>

#include "fisheye/errors.hpp"

namespace fisheye {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

const char* rep_color(const std::string& key) {
    if (key == "standard") return "#e6194b";
    if (key == "oriented") return "#3cb44b";
    if (key == "ellipse") return "#4363d8";
    if (key == "curved") return "#f58231";
    if (key == "poly4") return "#911eb4";
    if (key == "poly24") return "#42d4f4";
    if (key == "poly24-adaptive") return "#f032e6";
    if (key == "polar24") return "#bfef45";
    return "#9a6324";
}

void append_polygon(std::ostringstream& os, const std::vector<Vec2>& pts) {
    os << "    <polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << num(pts[i].x) << ',' << num(pts[i].y);
    }
    os << "\"/>\n";
}

void append_shape(std::ostringstream& os, const Shape& shape) {
    switch (shape_kind(shape)) {
        case ShapeKind::standard_box: {
            const auto& b = std::get<StandardBox>(shape);
            os << "    <rect x=\"" << num(b.center.x - b.width / 2) << "\" y=\""
               << num(b.center.y - b.height / 2) << "\" width=\"" << num(b.width)
               << "\" height=\"" << num(b.height) << "\"/>\n";
            break;
        }
        case ShapeKind::oriented_box: {
            const auto c = oriented_box_corners(std::get<OrientedBox>(shape));
            append_polygon(os, {c.begin(), c.end()});
            break;
        }
        case ShapeKind::ellipse: {
            const auto& e = std::get<EllipseShape>(shape);
            os << "    <ellipse cx=\"" << num(e.center.x) << "\" cy=\"" << num(e.center.y)
               << "\" rx=\"" << num(e.major_axis / 2) << "\" ry=\"" << num(e.minor_axis / 2)
               << "\" transform=\"rotate(" << num(e.angle_deg) << ' ' << num(e.center.x) << ' '
               << num(e.center.y) << ")\"/>\n";
            break;
        }
        case ShapeKind::curved_box: {
            const auto& c = std::get<CurvedBox>(shape);
            if (c.degenerate) {
                const auto corners = oriented_box_corners(c.degenerate_box);
                append_polygon(os, {corners.begin(), corners.end()});
                break;
            }
            const Vec2 p1 = c.circle_center + unit_from_angle(c.theta1) * c.r1;
            const Vec2 p2 = c.circle_center + unit_from_angle(c.theta2) * c.r1;
            const Vec2 p3 = c.circle_center + unit_from_angle(c.theta2) * c.r2;
            const Vec2 p4 = c.circle_center + unit_from_angle(c.theta1) * c.r2;
            const int large = (c.theta2 - c.theta1) > kPi ? 1 : 0;
            // Inner arc sweeps with increasing angle (sweep=1 in image coords),
            // outer arc returns against it.
            os << "    <path d=\"M " << num(p1.x) << ' ' << num(p1.y) << " A " << num(c.r1) << ' '
               << num(c.r1) << " 0 " << large << " 1 " << num(p2.x) << ' ' << num(p2.y) << " L "
               << num(p3.x) << ' ' << num(p3.y) << " A " << num(c.r2) << ' ' << num(c.r2) << " 0 "
               << large << " 0 " << num(p4.x) << ' ' << num(p4.y) << " L " << num(p1.x) << ' '
               << num(p1.y) << " Z\"/>\n";
            break;
        }
        case ShapeKind::vertex_polygon:
            append_polygon(os, std::get<VertexPolygon>(shape).absolute_vertices());
            break;
        case ShapeKind::polar_polygon:
            append_polygon(os, polar_polygon_vertices(std::get<PolarPolygon>(shape)));
            break;
    }
}

}  // namespace

std::string render_overlay(const AnnotatedImage& image, std::span<const std::string> rep_keys,
                           const OverlayStyle& style) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << image.width
       << "\" height=\"" << image.height << "\" viewBox=\"0 0 " << image.width << ' '
       << image.height << "\">\n"
       << "  <rect width=\"" << image.width << "\" height=\"" << image.height
       << "\" fill=\"#202020\"/>\n";

    if (style.draw_contours) {
        os << "  <g id=\"contours\" fill=\"#d0d0d0\" fill-opacity=\"0.35\" stroke=\"none\">\n";
        for (const AnnotatedObject& obj : image.objects) append_polygon(os, obj.contour.vertices);
        os << "  </g>\n";
    }
    for (const std::string& key : rep_keys) {
        os << "  <g id=\"" << key << "\" fill=\"none\" stroke=\"" << rep_color(key)
           << "\" stroke-width=\"" << num(style.stroke_width) << "\">\n";
        for (const AnnotatedObject& obj : image.objects) {
            const Shape* shape = obj.find_shape(key);
            if (shape != nullptr) append_shape(os, *shape);
        }
        os << "  </g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_curves_svg(Vec2 image_size, const std::vector<std::vector<Vec2>>& curves) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
       << num(image_size.x) << "\" height=\"" << num(image_size.y) << "\" viewBox=\"0 0 "
       << num(image_size.x) << ' ' << num(image_size.y) << "\">\n"
       << "  <rect width=\"" << num(image_size.x) << "\" height=\"" << num(image_size.y)
       << "\" fill=\"#202020\"/>\n  <g fill=\"none\" stroke=\"#42d4f4\" stroke-width=\"1\">\n";
    for (const auto& curve : curves) {
        os << "    <polyline points=\"";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (i) os << ' ';
            os << num(curve[i].x) << ',' << num(curve[i].y);
        }
        os << "\"/>\n";
    }
    os << "  </g>\n</svg>\n";
    return os.str();
}

}  // namespace fisheye
