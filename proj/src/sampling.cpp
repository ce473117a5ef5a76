#include "fisheye/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fisheye/errors.hpp"

namespace fisheye {

PolarPolygon sample_uniform_angular(const Contour& contour, int n) {
    if (n < 3) throw DegenerateInput("sample_uniform_angular: need at least 3 sectors");
    const auto& v = contour.vertices;
    const std::size_t m = v.size();
    if (m < 3) throw DegenerateInput("sample_uniform_angular: degenerate contour");

    const Vec2 c = polygon_centroid(contour);
    if (!point_in_polygon(contour, c))
        throw CentroidOutside("sample_uniform_angular: centroid lies outside the contour");

    PolarPolygon out;
    out.center = c;
    out.sectors.resize(n);
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * kPi * i / n;
        const Vec2 dir = unit_from_angle(phi);
        // Farthest intersection of the ray with any boundary edge.
        double best_r = -1.0;
        for (std::size_t e = 0; e < m; ++e) {
            const Vec2 a = v[e] - c;
            const Vec2 b = v[(e + 1) % m] - c;
            const Vec2 d = b - a;
            const double denom = cross(dir, d);
            if (std::abs(denom) < 1e-15) continue;
            const double t = cross(a, d) / denom;   // along the ray
            const double u = cross(a, dir) / denom; // along the edge
            if (t >= 0.0 && u >= 0.0 && u <= 1.0) best_r = std::max(best_r, t);
        }
        if (best_r < 0.0)
            throw DegenerateInput("sample_uniform_angular: ray found no boundary intersection");
        out.sectors[i] = {best_r, phi, 1};
    }
    return out;
}

VertexPolygon sample_uniform_perimeter(const Contour& contour, int n) {
    const Contour resampled = resample_arclength(contour, n);
    const Vec2 c = polygon_centroid(contour);
    VertexPolygon out;
    out.origin = c;
    out.sampling = PolygonSampling::uniform_perimeter;
    out.vertices.reserve(resampled.vertices.size());
    for (const Vec2& p : resampled.vertices) out.vertices.push_back(p - c);
    return out;
}

namespace {

// Region of support: grow k while the chord |p(i-k), p(i+k)| keeps lengthening.
int region_of_support(const Contour& c, std::size_t i, int k_min, int k_max) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    auto chord = [&](int k) {
        const std::size_t a = (i + n - static_cast<std::size_t>(k) % n) % n;
        const std::size_t b = (i + static_cast<std::size_t>(k)) % n;
        return distance(v[a], v[b]);
    };
    int k = k_min;
    double prev = chord(k_min);
    while (k < k_max) {
        const double next = chord(k + 1);
        if (next <= prev) break;
        prev = next;
        ++k;
    }
    return k;
}

// Douglas-Peucker over an open index range of the densified contour.
void simplify_range(const std::vector<Vec2>& pts, std::size_t a, std::size_t b, double eps,
                    std::vector<std::size_t>& keep) {
    const Vec2 pa = pts[a], pb = pts[b];
    const Vec2 d = pb - pa;
    const double len = norm(d);
    double worst = -1.0;
    std::size_t worst_i = a;
    for (std::size_t i = a + 1; i < b; ++i) {
        const double dist = len < 1e-12 ? distance(pts[i], pa)
                                        : std::abs(cross(d, pts[i] - pa)) / len;
        if (dist > worst) {
            worst = dist;
            worst_i = i;
        }
    }
    if (worst > eps && worst_i > a && worst_i < b) {
        simplify_range(pts, a, worst_i, eps, keep);
        keep.push_back(worst_i);
        simplify_range(pts, worst_i, b, eps, keep);
    }
}

// Closed-curve Douglas-Peucker seeded with two anchors; returns sorted indices.
std::vector<std::size_t> simplify_closed(const std::vector<Vec2>& pts, std::size_t anchor_a,
                                         std::size_t anchor_b, double eps) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> keep = {anchor_a, anchor_b};
    simplify_range(pts, anchor_a, anchor_b, eps, keep);
    std::vector<Vec2> unrolled(n - (anchor_b - anchor_a) + 1);
    for (std::size_t i = 0; i < unrolled.size(); ++i) unrolled[i] = pts[(anchor_b + i) % n];
    std::vector<std::size_t> keep2;
    simplify_range(unrolled, 0, unrolled.size() - 1, eps, keep2);
    for (std::size_t i : keep2) keep.push_back((anchor_b + i) % n);
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    return keep;
}

}  // namespace

VertexPolygon sample_adaptive(const Contour& contour, const AdaptiveSamplingConfig& cfg) {
    const int n_target = cfg.target_vertices;
    if (n_target < 4) throw DegenerateInput("sample_adaptive: need at least 4 target vertices");

    // Densify to a uniform-arclength working curve so curvature estimates are
    // scale-free and digital staircase noise is spanned by the support window.
    const int n_dense = std::max(256, cfg.densify_factor * n_target);
    const Contour dense = resample_arclength(contour, n_dense);
    const auto& pts = dense.vertices;
    const std::size_t n = pts.size();
    const double step = perimeter(contour) / static_cast<double>(n);

    std::vector<double> curvature(n);
    std::vector<int> support(n);
    for (std::size_t i = 0; i < n; ++i) {
        support[i] = region_of_support(dense, i, cfg.min_support, cfg.max_support);
        curvature[i] = local_curvature(dense, i, support[i]);
    }

    // Dominant points: curvature maxima within the support window that are
    // also prominent against the window minimum, which rejects resampling
    // wobble. Constant-curvature plateaus (circles, stadium arcs) yield none;
    // those regions get their vertices from the curvature-mass allocation.
    constexpr double kProminence = 1.15;
    std::vector<std::size_t> dominant;
    for (std::size_t i = 0; i < n; ++i) {
        if (curvature[i] <= 1e-12) continue;
        bool is_max = true;
        double window_min = curvature[i];
        for (int d = 1; d <= support[i] && is_max; ++d) {
            const std::size_t prev = (i + n - static_cast<std::size_t>(d)) % n;
            const std::size_t next = (i + static_cast<std::size_t>(d)) % n;
            if (curvature[prev] > curvature[i] || curvature[next] >= curvature[i]) is_max = false;
            window_min = std::min({window_min, curvature[prev], curvature[next]});
        }
        if (is_max && curvature[i] >= kProminence * window_min) dominant.push_back(i);
    }

    std::vector<std::size_t> selected;
    if (dominant.size() > static_cast<std::size_t>(n_target)) {
        // Reduce with Douglas-Peucker, binary-searching epsilon for the largest
        // kept set not exceeding the target.
        const std::size_t anchor_a = dominant[0];
        const std::size_t anchor_b = dominant[dominant.size() / 2];
        double lo = 0.0, hi = perimeter(contour);
        std::vector<std::size_t> best = {anchor_a, anchor_b};
        for (int it = 0; it < 64; ++it) {
            const double eps = 0.5 * (lo + hi);
            const auto keep = simplify_closed(pts, anchor_a, anchor_b, eps);
            if (keep.size() == static_cast<std::size_t>(n_target)) {
                best = keep;
                break;
            }
            if (keep.size() > static_cast<std::size_t>(n_target)) {
                lo = eps;
            } else {
                best = keep;
                hi = eps;
            }
        }
        selected = std::move(best);
    } else {
        selected = dominant;
    }
    if (selected.empty()) selected.push_back(0);
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    // Expand to exactly N: apportion the remaining budget across the gaps
    // between selected vertices by accumulated turn (curvature * arclength),
    // with a small length floor so straight runs keep a baseline density, then
    // place the allocation at equal arc-length steps inside each gap.
    const std::size_t n_sel = selected.size();
    if (n_sel < static_cast<std::size_t>(n_target)) {
        const std::size_t budget = static_cast<std::size_t>(n_target) - n_sel;
        const std::size_t n_gaps = n_sel;  // cyclic
        std::vector<double> weight(n_gaps, 0.0);
        std::vector<std::size_t> gap_len(n_gaps, 0);
        double total_turn = 0.0;
        for (std::size_t i = 0; i < n; ++i) total_turn += curvature[i] * step;
        const double floor_per_len = 0.25 * total_turn / (static_cast<double>(n) * step);
        for (std::size_t g = 0; g < n_gaps; ++g) {
            const std::size_t a = selected[g];
            const std::size_t b = selected[(g + 1) % n_sel];
            const std::size_t gap = n_sel == 1 ? n : (b + n - a) % n;
            gap_len[g] = gap;
            double turn = 0.0;
            for (std::size_t k = 1; k < gap; ++k) turn += curvature[(a + k) % n] * step;
            weight[g] = turn + floor_per_len * static_cast<double>(gap) * step;
        }
        const double total_w = std::accumulate(weight.begin(), weight.end(), 0.0);

        std::vector<std::size_t> alloc(n_gaps, 0);
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t used = 0;
        for (std::size_t g = 0; g < n_gaps; ++g) {
            const double quota = total_w > 0.0
                                     ? static_cast<double>(budget) * weight[g] / total_w
                                     : static_cast<double>(budget) / static_cast<double>(n_gaps);
            std::size_t k = static_cast<std::size_t>(quota);
            k = std::min(k, gap_len[g] > 0 ? gap_len[g] - 1 : 0);
            alloc[g] = k;
            used += k;
            remainders.push_back({quota - static_cast<double>(k), g});
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& x, const auto& y) {
            return x.first > y.first || (x.first == y.first && x.second < y.second);
        });
        std::size_t since_progress = 0;
        for (std::size_t r = 0; used < budget && since_progress < remainders.size();
             r = (r + 1) % remainders.size()) {
            const std::size_t g = remainders[r].second;
            if (alloc[g] + 1 < gap_len[g]) {
                ++alloc[g];
                ++used;
                since_progress = 0;
            } else {
                ++since_progress;
            }
        }

        // Place each gap's allocation at equal quantiles of the local measure
        // (turn plus the length floor), so vertices crowd the curved stretches
        // inside a gap as well as across gaps.
        std::vector<std::size_t> expanded;
        expanded.reserve(n_target);
        for (std::size_t g = 0; g < n_gaps; ++g) {
            expanded.push_back(selected[g]);
            const std::size_t gap = gap_len[g];
            if (alloc[g] == 0 || gap < 2) continue;
            std::vector<double> cum(gap, 0.0);
            double acc = 0.0;
            for (std::size_t k = 1; k < gap; ++k) {
                const std::size_t idx = (selected[g] + k) % n;
                acc += (curvature[idx] + floor_per_len) * step;
                cum[k] = acc;
            }
            std::size_t cursor = 1;
            std::size_t last_off = 0;
            for (std::size_t j = 1; j <= alloc[g]; ++j) {
                const double target = acc * static_cast<double>(j) /
                                      static_cast<double>(alloc[g] + 1);
                while (cursor + 1 < gap && cum[cursor] < target) ++cursor;
                std::size_t off = cursor;
                if (off <= last_off) off = last_off + 1;  // keep insertions distinct
                if (off >= gap) break;
                expanded.push_back((selected[g] + off) % n);
                last_off = off;
            }
        }
        std::sort(expanded.begin(), expanded.end());
        expanded.erase(std::unique(expanded.begin(), expanded.end()), expanded.end());
        selected = std::move(expanded);

        // Top up any shortfall from quantile collisions: split the widest
        // index gap at its midpoint.
        while (selected.size() < static_cast<std::size_t>(n_target) && selected.size() < n) {
            std::size_t widest = 0, widest_gap = 0;
            for (std::size_t s = 0; s < selected.size(); ++s) {
                const std::size_t a = selected[s];
                const std::size_t b = selected[(s + 1) % selected.size()];
                const std::size_t gap = selected.size() == 1 ? n : (b + n - a) % n;
                if (gap > widest_gap) {
                    widest_gap = gap;
                    widest = s;
                }
            }
            if (widest_gap < 2) break;
            const std::size_t insert_at = (selected[widest] + widest_gap / 2) % n;
            auto pos = std::lower_bound(selected.begin(), selected.end(), insert_at);
            if (pos != selected.end() && *pos == insert_at) break;
            selected.insert(pos, insert_at);
        }
    }

    // Trim any residual overshoot by dropping the lowest-curvature picks.
    while (selected.size() > static_cast<std::size_t>(n_target)) {
        std::size_t drop = 0;
        double low = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < selected.size(); ++s) {
            if (curvature[selected[s]] < low) {
                low = curvature[selected[s]];
                drop = s;
            }
        }
        selected.erase(selected.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    if (selected.size() != static_cast<std::size_t>(n_target))
        throw DegenerateInput("sample_adaptive: could not reach the target vertex count");

    const Vec2 c = polygon_centroid(contour);
    VertexPolygon out;
    out.origin = c;
    out.sampling = PolygonSampling::adaptive;
    out.vertices.reserve(selected.size());
    for (std::size_t i : selected) out.vertices.push_back(pts[i] - c);
    return out;
}

std::vector<int> sector_vertex_counts(const VertexPolygon& poly, int n_sectors) {
    if (n_sectors < 1) throw DegenerateInput("sector_vertex_counts: need at least 1 sector");
    std::vector<int> alpha(n_sectors, 0);
    const double sector = 2.0 * kPi / n_sectors;
    for (const Vec2& v : poly.vertices) {
        double a = std::atan2(v.y, v.x);
        if (a < 0.0) a += 2.0 * kPi;
        // Snap angles sitting a rounding error below a sector boundary.
        int idx = static_cast<int>((a + 1e-12) / sector);
        if (idx >= n_sectors) idx = 0;
        ++alpha[idx];
    }
    return alpha;
}

}  // namespace fisheye
