#include "fisheye/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "fisheye/errors.hpp"

namespace fisheye {

namespace {

std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
    std::ptrdiff_t m = i % static_cast<std::ptrdiff_t>(n);
    if (m < 0) m += static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(m);
}

}  // namespace

double signed_area(const Contour& c) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        acc += cross(a, b);
    }
    return 0.5 * acc;
}

double polygon_area(const Contour& c) { return std::abs(signed_area(c)); }

double perimeter(const Contour& c) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += distance(v[i], v[(i + 1) % n]);
    return acc;
}

Vec2 polygon_centroid(const Contour& c) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    const double a = signed_area(c);
    if (n == 0) return {};
    if (std::abs(a) < 1e-12) {
        // Zero-area loop: fall back to the vertex mean.
        Vec2 mean{};
        for (const Vec2& p : v) mean += p;
        return mean / static_cast<double>(n);
    }
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        const double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool point_in_polygon(const Contour& c, Vec2 p) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool is_convex(const Contour& c) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    if (n < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e1 = v[(i + 1) % n] - v[i];
        const Vec2 e2 = v[(i + 2) % n] - v[(i + 1) % n];
        const double cr = cross(e1, e2);
        const double scale = norm(e1) * norm(e2);
        if (std::abs(cr) <= 1e-12 * std::max(1.0, scale)) continue;
        const int s = cr > 0.0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
    }
    return true;
}

namespace {

// Proper crossing of segment interiors; shared endpoints do not count.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(d - c, a - c);
    const double d2 = cross(d - c, b - c);
    const double d3 = cross(b - a, c - a);
    const double d4 = cross(b - a, d - a);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    // Collinear overlap of more than a single point is also invalid.
    if (d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0) {
        const Vec2 dir = b - a;
        const double la = 0.0, lb = dot(dir, b - a);
        double lc = dot(dir, c - a), ld = dot(dir, d - a);
        if (lc > ld) std::swap(lc, ld);
        const double lo = std::max(std::min(la, lb), lc);
        const double hi = std::min(std::max(la, lb), ld);
        if (hi - lo > 1e-12 * std::max(1.0, std::abs(lb))) return true;
    }
    return false;
}

}  // namespace

bool is_simple_polygon(const Contour& c) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] == v[(i + 1) % n]) return false;  // zero-length edge
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges
            if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

Contour normalize_ccw(Contour c) {
    if (signed_area(c) < 0.0) std::reverse(c.vertices.begin(), c.vertices.end());
    return c;
}

Contour make_contour(std::vector<Vec2> vertices, const std::string& label) {
    const std::string tag = label.empty() ? std::string{} : " (" + label + ")";
    if (vertices.size() < 3)
        throw InvalidContour("contour needs at least 3 vertices, got " +
                             std::to_string(vertices.size()) + tag);
    Contour c{std::move(vertices), true};
    if (!is_simple_polygon(c)) throw InvalidContour("contour is self-intersecting" + tag);
    return normalize_ccw(std::move(c));
}

Aabb bounding_box(std::span<const Vec2> points) {
    if (points.empty()) throw DegenerateInput("bounding_box of empty point set");
    Aabb box{points[0], points[0]};
    for (const Vec2& p : points) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
    }
    return box;
}

Aabb bounding_box(const Contour& c) { return bounding_box(std::span<const Vec2>(c.vertices)); }

Contour convex_hull(std::span<const Vec2> points) {
    if (points.size() < 3) throw DegenerateInput("convex hull needs at least 3 points");
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(),
              [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) throw DegenerateInput("convex hull of degenerate point set");

    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw DegenerateInput("input points are collinear");
    return Contour{std::move(hull), true};
}

std::array<Vec2, 4> rect_corners(const RotatedRect& r) {
    const Vec2 u = unit_from_angle(deg_to_rad(r.angle_deg));
    const Vec2 v = perp(u);
    const Vec2 du = u * (0.5 * r.width);
    const Vec2 dv = v * (0.5 * r.height);
    return {r.center - du - dv, r.center + du - dv, r.center + du + dv, r.center - du + dv};
}

namespace {

// Canonical oriented-rect representation: angle in [-90, 90), preferring the
// smaller magnitude and breaking the remaining tie toward the positive angle.
RotatedRect canonicalize_rect(Vec2 center, Vec2 u, double extent_u, double extent_v) {
    double a = rad_to_deg(std::atan2(u.y, u.x));
    a = std::fmod(a, 180.0);
    if (a < -90.0) a += 180.0;
    if (a >= 90.0) a -= 180.0;
    const double b = a >= 0.0 ? a - 90.0 : a + 90.0;

    const double pick_a = std::abs(a);
    const double pick_b = std::abs(b);
    if (pick_b < pick_a || (pick_b == pick_a && b > a))
        return {center, extent_v, extent_u, b};
    return {center, extent_u, extent_v, a};
}

}  // namespace

RotatedRect min_area_rect(const Contour& c) {
    const Contour hull = convex_hull(c.vertices);
    const auto& h = hull.vertices;
    const std::size_t n = h.size();

    double best_area = std::numeric_limits<double>::infinity();
    Vec2 best_u;
    double best_lo_u = 0, best_hi_u = 0, best_lo_v = 0, best_hi_v = 0;

    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 edge = h[(i + 1) % n] - h[i];
        const double len = norm(edge);
        if (len < 1e-12) continue;
        const Vec2 u = edge / len;
        const Vec2 v = perp(u);
        double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u;
        double lo_v = lo_u, hi_v = -lo_u;
        for (const Vec2& p : h) {
            const double pu = dot(u, p), pv = dot(v, p);
            lo_u = std::min(lo_u, pu);
            hi_u = std::max(hi_u, pu);
            lo_v = std::min(lo_v, pv);
            hi_v = std::max(hi_v, pv);
        }
        const double area = (hi_u - lo_u) * (hi_v - lo_v);
        if (area < best_area) {
            best_area = area;
            best_u = u;
            best_lo_u = lo_u;
            best_hi_u = hi_u;
            best_lo_v = lo_v;
            best_hi_v = hi_v;
        }
    }
    if (!std::isfinite(best_area)) throw DegenerateInput("min_area_rect: degenerate contour");

    const Vec2 v = perp(best_u);
    const double cu = 0.5 * (best_lo_u + best_hi_u);
    const double cv = 0.5 * (best_lo_v + best_hi_v);
    const Vec2 center = best_u * cu + v * cv;
    return canonicalize_rect(center, best_u, best_hi_u - best_lo_u, best_hi_v - best_lo_v);
}

namespace {

struct Sym2 {
    double a = 0, b = 0, c = 0;  // [[a, b], [b, c]]
};

// Eigen-decomposition of a symmetric 2x2 matrix; returns {eval_big, eval_small}
// and the unit eigenvector of eval_big.
void eigen_sym2(const Sym2& s, double& big, double& small, Vec2& big_vec) {
    const double half_tr = 0.5 * (s.a + s.c);
    const double disc = std::sqrt(std::max(0.0, 0.25 * (s.a - s.c) * (s.a - s.c) + s.b * s.b));
    big = half_tr + disc;
    small = half_tr - disc;
    Vec2 v1{s.b, big - s.a};
    Vec2 v2{big - s.c, s.b};
    big_vec = normalized(norm2(v1) >= norm2(v2) ? v1 : v2);
    if (norm2(big_vec) == 0.0) big_vec = {1.0, 0.0};
}

bool invert3(const std::array<double, 9>& m, std::array<double, 9>& out) {
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                       m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    if (std::abs(det) < 1e-300) return false;
    const double inv = 1.0 / det;
    out[0] = (m[4] * m[8] - m[5] * m[7]) * inv;
    out[1] = (m[2] * m[7] - m[1] * m[8]) * inv;
    out[2] = (m[1] * m[5] - m[2] * m[4]) * inv;
    out[3] = (m[5] * m[6] - m[3] * m[8]) * inv;
    out[4] = (m[0] * m[8] - m[2] * m[6]) * inv;
    out[5] = (m[2] * m[3] - m[0] * m[5]) * inv;
    out[6] = (m[3] * m[7] - m[4] * m[6]) * inv;
    out[7] = (m[1] * m[6] - m[0] * m[7]) * inv;
    out[8] = (m[0] * m[4] - m[1] * m[3]) * inv;
    return true;
}

}  // namespace

EllipseFitResult min_enclosing_ellipse(const Contour& c, double tolerance, int max_iterations) {
    const auto& pts = c.vertices;
    const std::size_t n = pts.size();
    if (n < 3) throw DegenerateInput("min_enclosing_ellipse needs at least 3 points");

    std::vector<double> u(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < max_iterations; ++it) {
        std::array<double, 9> X{};  // X = sum u_i q_i q_i^T, q = (x, y, 1)
        for (std::size_t i = 0; i < n; ++i) {
            const double w = u[i];
            const double x = pts[i].x, y = pts[i].y;
            X[0] += w * x * x;
            X[1] += w * x * y;
            X[2] += w * x;
            X[4] += w * y * y;
            X[5] += w * y;
            X[8] += w;
        }
        X[3] = X[1];
        X[6] = X[2];
        X[7] = X[5];
        std::array<double, 9> Xi{};
        if (!invert3(X, Xi)) throw DegenerateInput("min_enclosing_ellipse: collinear points");

        double max_m = -1.0;
        std::size_t max_j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = pts[i].x, y = pts[i].y;
            const double m = x * (Xi[0] * x + Xi[1] * y + Xi[2]) +
                             y * (Xi[3] * x + Xi[4] * y + Xi[5]) +
                             (Xi[6] * x + Xi[7] * y + Xi[8]);
            if (m > max_m) {
                max_m = m;
                max_j = i;
            }
        }
        if (max_m <= 3.0 * (1.0 + tolerance)) break;
        const double step = (max_m - 3.0) / (3.0 * (max_m - 1.0));
        for (double& w : u) w *= 1.0 - step;
        u[max_j] += step;
    }

    Vec2 center{};
    for (std::size_t i = 0; i < n; ++i) center += pts[i] * u[i];
    Sym2 S;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 d = pts[i] - center;
        S.a += u[i] * d.x * d.x;
        S.b += u[i] * d.x * d.y;
        S.c += u[i] * d.y * d.y;
    }
    // Shape matrix A = inv(2 S); ellipse is (p-c)^T A (p-c) <= 1.
    const double det = S.a * S.c - S.b * S.b;
    if (det < 1e-300) throw DegenerateInput("min_enclosing_ellipse: collinear points");
    Sym2 A{S.c / (2.0 * det), -S.b / (2.0 * det), S.a / (2.0 * det)};

    // Rescale so the farthest point sits exactly on the boundary.
    double max_q = 0.0;
    for (const Vec2& p : pts) {
        const Vec2 d = p - center;
        max_q = std::max(max_q, A.a * d.x * d.x + 2.0 * A.b * d.x * d.y + A.c * d.y * d.y);
    }
    if (max_q > 0.0) {
        A.a /= max_q;
        A.b /= max_q;
        A.c /= max_q;
    }

    double big, small;
    Vec2 big_vec;
    eigen_sym2({A.a, A.b, A.c}, big, small, big_vec);
    if (small <= 0.0) throw DegenerateInput("min_enclosing_ellipse: collinear points");
    // Major axis corresponds to the smaller eigenvalue.
    const double semi_major = 1.0 / std::sqrt(small);
    const double semi_minor = 1.0 / std::sqrt(big);
    Vec2 major_vec = perp(big_vec);
    double angle = rad_to_deg(std::atan2(major_vec.y, major_vec.x));
    if (angle >= 90.0) angle -= 180.0;
    if (angle < -90.0) angle += 180.0;
    return {center, semi_major, semi_minor, angle};
}

double CircleFitResult::max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, std::abs(r));
    return m;
}

CircleFitResult fit_circle_kasa(std::span<const Vec2> points) {
    const std::size_t n = points.size();
    if (n < 3) throw DegenerateInput("fit_circle_kasa needs at least 3 points");

    // Center the data for conditioning.
    Vec2 mean{};
    for (const Vec2& p : points) mean += p;
    mean = mean / static_cast<double>(n);

    double sxx = 0, sxy = 0, syy = 0, sxz = 0, syz = 0, sz = 0;
    for (const Vec2& p : points) {
        const double x = p.x - mean.x, y = p.y - mean.y;
        const double z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxz += x * z;
        syz += y * z;
        sz += z;
    }

    const double det = sxx * syy - sxy * sxy;
    const double spread = sxx + syy;
    CircleFitResult out;

    if (det <= 1e-12 * std::max(1.0, spread * spread)) {
        // Collinear: total-least-squares line through the mean.
        double big, small;
        Vec2 dir;
        eigen_sym2({sxx, sxy, syy}, big, small, dir);
        out.line_fallback = true;
        out.line_point = mean;
        out.line_dir = dir;
        out.residuals.reserve(n);
        const Vec2 nrm = perp(dir);
        for (const Vec2& p : points) out.residuals.push_back(dot(p - mean, nrm));
        return out;
    }

    // Solve for center offset (cx, cy) relative to the mean: minimizes the
    // algebraic distance of x^2+y^2 + D x + E y + F.
    const double cx = (sxz * syy - syz * sxy) / (2.0 * det);
    const double cy = (syz * sxx - sxz * sxy) / (2.0 * det);
    const double r2 = cx * cx + cy * cy + sz / static_cast<double>(n);

    out.center = mean + Vec2{cx, cy};
    out.radius = std::sqrt(std::max(0.0, r2));
    out.residuals.reserve(n);
    for (const Vec2& p : points) out.residuals.push_back(distance(p, out.center) - out.radius);
    return out;
}

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw DegenerateInput("BinaryMask dimensions must be positive");
    stride_ = (width + 63) / 64;
    words_.assign(static_cast<std::size_t>(stride_) * height, 0);
}

bool BinaryMask::get(int x, int y) const {
    return (words_[static_cast<std::size_t>(y) * stride_ + x / 64] >> (x % 64)) & 1u;
}

void BinaryMask::set(int x, int y, bool value) {
    auto& w = words_[static_cast<std::size_t>(y) * stride_ + x / 64];
    const std::uint64_t bit = std::uint64_t{1} << (x % 64);
    if (value) w |= bit;
    else w &= ~bit;
}

void BinaryMask::fill_row_span(int y, int x_begin, int x_end) {
    if (x_begin < 0) x_begin = 0;
    if (x_end > width_) x_end = width_;
    if (x_begin >= x_end) return;
    std::uint64_t* row = words_.data() + static_cast<std::size_t>(y) * stride_;
    int w0 = x_begin / 64, w1 = (x_end - 1) / 64;
    const std::uint64_t first = ~std::uint64_t{0} << (x_begin % 64);
    const std::uint64_t last = ~std::uint64_t{0} >> (63 - (x_end - 1) % 64);
    if (w0 == w1) {
        row[w0] |= first & last;
    } else {
        row[w0] |= first;
        for (int w = w0 + 1; w < w1; ++w) row[w] = ~std::uint64_t{0};
        row[w1] |= last;
    }
}

std::int64_t BinaryMask::count() const {
    std::int64_t acc = 0;
    for (std::uint64_t w : words_) acc += std::popcount(w);
    return acc;
}

namespace {

BinaryMask rasterize_impl(const Contour& c, const GridSpec2D& grid, bool clip) {
    if (grid.width <= 0 || grid.height <= 0 || grid.resolution <= 0.0)
        throw DegenerateInput("rasterize_polygon: invalid grid");
    const std::size_t n = c.vertices.size();
    if (n < 3) throw DegenerateInput("rasterize_polygon: contour has fewer than 3 vertices");

    std::vector<Vec2> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = (c.vertices[i] - grid.origin) * grid.resolution;

    if (!clip) {
        for (const Vec2& p : g)
            if (p.x < 0.0 || p.y < 0.0 || p.x > grid.width || p.y > grid.height)
                throw OutOfBounds("rasterize_polygon: contour exceeds grid bounds");
    }

    BinaryMask mask(grid.width, grid.height);
    std::vector<double> xs;
    double lo_y = g[0].y, hi_y = g[0].y;
    for (const Vec2& p : g) {
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    const int iy_begin = std::max(0, static_cast<int>(std::floor(lo_y - 0.5)));
    const int iy_end = std::min(grid.height, static_cast<int>(std::ceil(hi_y + 0.5)));

    for (int iy = iy_begin; iy < iy_end; ++iy) {
        const double y = iy + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = g[i];
            const Vec2& b = g[(i + 1) % n];
            if ((a.y > y) != (b.y > y))
                xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int x0 = static_cast<int>(std::ceil(xs[k] - 0.5));
            const int x1 = static_cast<int>(std::ceil(xs[k + 1] - 0.5));
            mask.fill_row_span(iy, x0, x1);
        }
    }
    return mask;
}

}  // namespace

BinaryMask rasterize_polygon(const Contour& c, const GridSpec2D& grid) {
    return rasterize_impl(c, grid, false);
}

BinaryMask rasterize_polygon_clipped(const Contour& c, const GridSpec2D& grid) {
    return rasterize_impl(c, grid, true);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch("mask_iou: dimensions differ");
    const auto wa = a.words();
    const auto wb = b.words();
    std::int64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        inter += std::popcount(wa[i] & wb[i]);
        uni += std::popcount(wa[i] | wb[i]);
    }
    if (uni == 0) throw BothEmpty("mask_iou: both masks empty");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

std::vector<Vec2> clip_by_halfplane(const std::vector<Vec2>& poly, Vec2 a, Vec2 b) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    const Vec2 e = b - a;
    auto side = [&](Vec2 p) { return cross(e, p - a); };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 cur = poly[i];
        const Vec2 nxt = poly[(i + 1) % n];
        const double sc = side(cur), sn = side(nxt);
        if (sc >= 0.0) out.push_back(cur);
        if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back(cur + (nxt - cur) * t);
        }
    }
    return out;
}

}  // namespace

double convex_intersection_area(const Contour& a, const Contour& b) {
    const Contour an = normalize_ccw(a);
    const Contour bn = normalize_ccw(b);
    std::vector<Vec2> poly = an.vertices;
    const auto& clipper = bn.vertices;
    const std::size_t m = clipper.size();
    for (std::size_t i = 0; i < m && !poly.empty(); ++i)
        poly = clip_by_halfplane(poly, clipper[i], clipper[(i + 1) % m]);
    if (poly.size() < 3) return 0.0;
    return polygon_area(Contour{std::move(poly), true});
}

double convex_clip_iou(const Contour& a, const Contour& b) {
    if (!is_convex(a) || !is_convex(b)) throw NonConvexInput("convex_clip_iou: input not convex");
    const double inter = convex_intersection_area(a, b);
    const double uni = polygon_area(a) + polygon_area(b) - inter;
    if (uni <= 0.0) throw BothEmpty("convex_clip_iou: zero union area");
    return inter / uni;
}

Contour resample_arclength(const Contour& c, int n) {
    if (n < 3) throw DegenerateInput("resample_arclength: need at least 3 output vertices");
    const auto& v = c.vertices;
    const std::size_t m = v.size();
    if (m < 3) throw DegenerateInput("resample_arclength: degenerate contour");

    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + distance(v[i], v[(i + 1) % m]);
    const double total = cum[m];
    if (total <= 0.0) throw DegenerateInput("resample_arclength: zero perimeter");

    Contour out;
    out.vertices.reserve(n);
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(n);
        while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double t = seg_len > 0.0 ? (s - cum[seg]) / seg_len : 0.0;
        out.vertices.push_back(v[seg] + (v[(seg + 1) % m] - v[seg]) * t);
    }
    return out;
}

double local_curvature(const Contour& c, std::size_t index, int support) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    if (n < 3 || index >= n) return 0.0;
    const Vec2 a = v[wrap_index(static_cast<std::ptrdiff_t>(index) - support, n)];
    const Vec2 b = v[index];
    const Vec2 d = v[wrap_index(static_cast<std::ptrdiff_t>(index) + support, n)];
    const double area2 = cross(b - a, d - a);
    const double la = distance(a, b), lb = distance(b, d), lc = distance(d, a);
    const double denom = la * lb * lc;
    if (denom < 1e-12 || std::abs(area2) < 1e-12 * denom) return 0.0;
    // circumradius R = |ab| |bd| |da| / (2 |cross|)
    return 2.0 * std::abs(area2) / denom;
}

void write_pgm(const BinaryMask& mask, std::ostream& os) {
    os << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
    std::vector<char> row(mask.width());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) row[x] = mask.get(x, y) ? char(255) : char(0);
        os.write(row.data(), row.size());
    }
}

void write_pgm_file(const BinaryMask& mask, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw OutOfBounds("cannot open " + path + " for writing");
    write_pgm(mask, f);
}

}  // namespace fisheye
