#include "fisheye/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <random>

#include "fisheye/errors.hpp"
#include "fisheye/parallel.hpp"

namespace fisheye {

namespace {

// Engine-portable uniform doubles in [0, 1).
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct Footprint {
    Vec2 center;
    Vec2 half;  // (l/2, w/2)
    double yaw;
};

std::array<Vec2, 4> footprint_corners(const Footprint& f) {
    const Vec2 u = unit_from_angle(f.yaw);
    const Vec2 v = perp(u);
    const Vec2 du = u * f.half.x;
    const Vec2 dv = v * f.half.y;
    return {f.center - du - dv, f.center + du - dv, f.center + du + dv, f.center - du + dv};
}

// Separating-axis overlap test for two rotated rectangles.
bool footprints_overlap(const Footprint& a, const Footprint& b, double margin) {
    const auto ca = footprint_corners(a);
    const auto cb = footprint_corners(b);
    const std::array<Vec2, 4> axes{unit_from_angle(a.yaw), perp(unit_from_angle(a.yaw)),
                                   unit_from_angle(b.yaw), perp(unit_from_angle(b.yaw))};
    for (const Vec2& axis : axes) {
        double lo_a = 1e300, hi_a = -1e300, lo_b = 1e300, hi_b = -1e300;
        for (const Vec2& p : ca) {
            const double d = dot(axis, p);
            lo_a = std::min(lo_a, d);
            hi_a = std::max(hi_a, d);
        }
        for (const Vec2& p : cb) {
            const double d = dot(axis, p);
            lo_b = std::min(lo_b, d);
            hi_b = std::max(hi_b, d);
        }
        if (hi_a + margin < lo_b || hi_b + margin < lo_a) return false;
    }
    return true;
}

Footprint object_footprint(const SceneObject& obj) {
    // All parts share the body yaw; the body (part 0) dominates the footprint.
    const Cuboid& body = obj.parts.front();
    return {{body.center.x, body.center.y}, {body.half_extents.x, body.half_extents.y},
            body.yaw_rad};
}

}  // namespace

namespace {

SceneObject build_vehicle(int id, Vec2 pos, double yaw, double length, double width,
                          double height, double style) {
    SceneObject obj;
    obj.id = id;
    obj.cls = "vehicle";
    const Vec2 u = unit_from_angle(yaw);
    const Vec2 v = perp(u);
    const bool boxy = style >= 0.8;  // vans keep a slab profile
    const double clearance = 0.18 * height;
    const double body_top = boxy ? 0.9 * height : 0.5 * height;

    // Body slab floats above the ground on two axle stubs; the stepped
    // greenhouse tapers toward the roof so the silhouette reads as hood,
    // windshield and cabin rather than a single box.
    obj.parts.push_back(Cuboid{{pos.x, pos.y, (clearance + body_top) / 2.0},
                               {length / 2.0, width / 2.0, (body_top - clearance) / 2.0},
                               yaw});
    for (double axle : {0.33, -0.33}) {
        const Vec2 ap = pos + u * (axle * length);
        obj.parts.push_back(Cuboid{{ap.x, ap.y, (clearance + 0.04 * height) / 2.0},
                                   {0.11 * length, 0.47 * width,
                                    (clearance + 0.04 * height) / 2.0},
                                   yaw});
    }
    Vec2 roof_pos = pos;
    double roof_z = body_top;
    if (!boxy) {
        const double shift = (style < 0.4 ? 1.0 : -1.0) * 0.1 * length;
        const double mid_top = 0.76 * height;
        const Vec2 cp1 = pos + u * shift;
        obj.parts.push_back(Cuboid{{cp1.x, cp1.y, (body_top + mid_top) / 2.0},
                                   {0.3 * length, 0.45 * width, (mid_top - body_top) / 2.0},
                                   yaw});
        const Vec2 cp2 = pos + u * (shift * 1.4);
        obj.parts.push_back(Cuboid{{cp2.x, cp2.y, (mid_top + height) / 2.0},
                                   {0.18 * length, 0.42 * width, (height - mid_top) / 2.0},
                                   yaw});
        roof_pos = cp2;
        roof_z = height;
    }
    // Side mirrors: thin arms overlapping the body edge near the top.
    for (double side : {1.0, -1.0}) {
        const Vec2 mp = pos + u * (0.3 * length) + v * (side * (width / 2.0 + 0.13));
        obj.parts.push_back(Cuboid{{mp.x, mp.y, 0.9 * body_top}, {0.07, 0.18, 0.05}, yaw});
    }
    // Roof gear (antenna, rack stub): a thin vertical feature reads in the
    // silhouette from every horizontal view direction.
    const double frac = style * 8.0 - std::floor(style * 8.0);
    if (frac < 0.8) {
        const double rod_h = 0.18 + 0.3 * frac;
        obj.parts.push_back(Cuboid{{roof_pos.x, roof_pos.y, roof_z + rod_h / 2.0 - 0.02},
                                   {0.035, 0.035, rod_h / 2.0 + 0.02},
                                   yaw});
    }
    return obj;
}

}  // namespace

std::vector<SceneObject> generate_scene(const SceneConfig& cfg) {
    if (cfg.n_objects < 0) throw DegenerateInput("generate_scene: negative object count");
    Rng rng(cfg.seed);
    std::vector<SceneObject> scene;

    // The ego car occupies a keep-out rectangle at the rig origin.
    const Footprint ego{{1.25, 0.0}, {2.4, 1.0}, 0.0};
    int id = 0;

    // Two parked rows flanking the ego car, nose-to-tail with small gaps; the
    // mutual occlusion fragments are what the side cameras mostly see.
    for (double row_side : {1.0, -1.0}) {
        if (!cfg.parked_rows || id >= cfg.n_objects) break;
        const double row_y = row_side * rng.uniform(3.0, 4.1);
        const double row_dir = rng.uniform() < 0.5 ? 0.0 : kPi;
        double x = -rng.uniform(8.0, 10.5);
        const double x_end = rng.uniform(8.0, 10.5);
        while (x < x_end && id < cfg.n_objects) {
            double length = rng.uniform(cfg.min_length, cfg.max_length);
            const double width = rng.uniform(cfg.min_width, cfg.max_width);
            double height = rng.uniform(cfg.min_height, cfg.max_height);
            const double style = rng.uniform();
            if (style > 0.85) {  // vans and buses
                length = rng.uniform(1.4, 2.0) * length;
                height = rng.uniform(1.2, 1.5) * height;
            }
            const double yaw = row_dir + rng.uniform(-0.12, 0.12);
            const Vec2 pos{x + length / 2.0, row_y + rng.uniform(-0.25, 0.25)};
            SceneObject obj = build_vehicle(id, pos, yaw, length, width, height, style);
            if (!footprints_overlap(object_footprint(obj), ego, 0.2)) {
                scene.push_back(std::move(obj));
                ++id;
            }
            x += length + rng.uniform(0.35, 1.4);
        }
    }

    // Remaining objects scattered on a ring with rejection sampling.
    while (id < cfg.n_objects) {
        bool placed = false;
        for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
            const double ring_angle = rng.uniform(0.0, 2.0 * kPi);
            const double ring_radius =
                rng.uniform(cfg.placement_min_radius, cfg.placement_max_radius);
            const Vec2 pos{ring_radius * std::cos(ring_angle), ring_radius * std::sin(ring_angle)};
            const double yaw = rng.uniform(0.0, 2.0 * kPi);
            double length = rng.uniform(cfg.min_length, cfg.max_length);
            const double width = rng.uniform(cfg.min_width, cfg.max_width);
            double height = rng.uniform(cfg.min_height, cfg.max_height);
            const double style = rng.uniform();
            if (style > 0.85) {
                length = rng.uniform(1.4, 2.0) * length;
                height = rng.uniform(1.2, 1.5) * height;
            }
            SceneObject obj = build_vehicle(id, pos, yaw, length, width, height,
                                            cfg.compound ? style : 1.0);
            const Footprint fp = object_footprint(obj);
            bool collides = footprints_overlap(fp, ego, 0.2);
            for (const SceneObject& other : scene) {
                if (collides) break;
                collides = footprints_overlap(fp, object_footprint(other), 0.05);
            }
            if (!collides) {
                scene.push_back(std::move(obj));
                placed = true;
            }
        }
        if (!placed)
            throw PlacementFailed("generate_scene: could not place object " + std::to_string(id) +
                                  " after " + std::to_string(cfg.max_retries) + " attempts");
        ++id;
    }
    return scene;
}

namespace {

struct FaceGrid {
    Vec3 origin;  // corner of the face
    Vec3 edge_u;
    Vec3 edge_v;
};

std::array<Vec3, 8> cuboid_corners(const Cuboid& c) {
    const Vec2 u2 = unit_from_angle(c.yaw_rad);
    const Vec3 u{u2.x, u2.y, 0.0};
    const Vec3 v{-u2.y, u2.x, 0.0};
    const Vec3 w{0.0, 0.0, 1.0};
    std::array<Vec3, 8> out;
    int k = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                out[k++] = c.center + u * (sx * c.half_extents.x) + v * (sy * c.half_extents.y) +
                           w * (sz * c.half_extents.z);
    return out;
}

std::array<FaceGrid, 6> cuboid_faces(const Cuboid& c) {
    const Vec2 u2 = unit_from_angle(c.yaw_rad);
    const Vec3 u{u2.x, u2.y, 0.0};
    const Vec3 v{-u2.y, u2.x, 0.0};
    const Vec3 w{0.0, 0.0, 1.0};
    const Vec3 du = u * (2.0 * c.half_extents.x);
    const Vec3 dv = v * (2.0 * c.half_extents.y);
    const Vec3 dw = w * (2.0 * c.half_extents.z);
    const Vec3 base = c.center - u * c.half_extents.x - v * c.half_extents.y -
                      w * c.half_extents.z;
    return {FaceGrid{base, du, dv},           // bottom
            FaceGrid{base + dw, du, dv},      // top
            FaceGrid{base, du, dw},           // side -v
            FaceGrid{base + dv, du, dw},      // side +v
            FaceGrid{base, dv, dw},           // side -u
            FaceGrid{base + du, dv, dw}};     // side +u
}

// Largest 4-connected component of the given label, holes filled.
BinaryMask extract_component(const std::vector<int>& ids, int w, int h, int label) {
    std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
    int n_comps = 0;
    std::size_t best_size = 0;
    int best_comp = -1;
    std::deque<int> queue;
    for (int start = 0; start < w * h; ++start) {
        if (ids[start] != label || comp[start] >= 0) continue;
        const int c = n_comps++;
        std::size_t size = 0;
        comp[start] = c;
        queue.push_back(start);
        while (!queue.empty()) {
            const int cur = queue.front();
            queue.pop_front();
            ++size;
            const int x = cur % w, y = cur / w;
            const int neighbors[4] = {cur - 1, cur + 1, cur - w, cur + w};
            const bool valid[4] = {x > 0, x < w - 1, y > 0, y < h - 1};
            for (int k = 0; k < 4; ++k) {
                if (!valid[k]) continue;
                const int nb = neighbors[k];
                if (ids[nb] == label && comp[nb] < 0) {
                    comp[nb] = c;
                    queue.push_back(nb);
                }
            }
        }
        if (size > best_size) {
            best_size = size;
            best_comp = c;
        }
    }
    BinaryMask mask(w, h);
    if (best_comp < 0) return mask;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (comp[static_cast<std::size_t>(y) * w + x] == best_comp) mask.set(x, y, true);

    // Fill holes: flood the background from the border; unreachable background
    // becomes foreground.
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
    auto push_if_bg = [&](int x, int y) {
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        if (!outside[idx] && !mask.get(x, y)) {
            outside[idx] = 1;
            queue.push_back(static_cast<int>(idx));
        }
    };
    for (int x = 0; x < w; ++x) {
        push_if_bg(x, 0);
        push_if_bg(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push_if_bg(0, y);
        push_if_bg(w - 1, y);
    }
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        const int x = cur % w, y = cur / w;
        if (x > 0) push_if_bg(x - 1, y);
        if (x < w - 1) push_if_bg(x + 1, y);
        if (y > 0) push_if_bg(x, y - 1);
        if (y < h - 1) push_if_bg(x, y + 1);
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!mask.get(x, y) && !outside[static_cast<std::size_t>(y) * w + x])
                mask.set(x, y, true);
    return mask;
}

// Crack-boundary trace: directed lattice edges with the region on a consistent
// side, stitched into the single outer loop and collinear-merged. Rasterizing
// the result with the pixel-center rule reproduces the mask exactly.
Contour trace_boundary(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    auto fg = [&](int x, int y) {
        return x >= 0 && x < w && y >= 0 && y < h && mask.get(x, y);
    };

    // Outgoing edges per corner; a corner can host up to two (pinch case).
    struct Edge {
        int dx, dy;
        bool used = false;
    };
    std::multimap<std::int64_t, Edge> edges;
    auto key = [&](int x, int y) { return static_cast<std::int64_t>(y) * (w + 1) + x; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            if (!fg(x, y - 1)) edges.insert({key(x, y), {1, 0}});          // north side
            if (!fg(x + 1, y)) edges.insert({key(x + 1, y), {0, 1}});      // east side
            if (!fg(x, y + 1)) edges.insert({key(x + 1, y + 1), {-1, 0}}); // south side
            if (!fg(x - 1, y)) edges.insert({key(x, y + 1), {0, -1}});     // west side
        }
    }
    if (edges.empty()) throw DegenerateInput("trace_boundary: empty mask");

    // Start from the lexicographically first edge and follow the loop, turning
    // counterclockwise-most at ambiguous corners so the two lobes of a pinch do
    // not cross.
    auto start_it = edges.begin();
    int sx = static_cast<int>(start_it->first % (w + 1));
    int sy = static_cast<int>(start_it->first / (w + 1));
    std::vector<Vec2> loop;
    int cx = sx, cy = sy;
    int din_x = 0, din_y = 0;
    for (std::size_t guard = 0; guard <= 2 * edges.size() + 4; ++guard) {
        auto [lo, hi] = edges.equal_range(key(cx, cy));
        auto pick = edges.end();
        for (auto it = lo; it != hi; ++it) {
            if (it->second.used) continue;
            if (pick == edges.end()) {
                pick = it;
            } else {
                // Two candidates: prefer the counterclockwise turn.
                const int cr = din_x * it->second.dy - din_y * it->second.dx;
                if (cr > 0) pick = it;
            }
        }
        if (pick == edges.end()) break;
        pick->second.used = true;
        loop.push_back({static_cast<double>(cx), static_cast<double>(cy)});
        din_x = pick->second.dx;
        din_y = pick->second.dy;
        cx += din_x;
        cy += din_y;
        if (cx == sx && cy == sy) break;
    }
    if (loop.size() < 4) throw DegenerateInput("trace_boundary: degenerate loop");

    // Merge collinear runs.
    std::vector<Vec2> merged;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 prev = loop[(i + n - 1) % n];
        const Vec2 cur = loop[i];
        const Vec2 next = loop[(i + 1) % n];
        if (std::abs(cross(cur - prev, next - cur)) > 1e-12) merged.push_back(cur);
    }
    if (merged.size() < 3) throw DegenerateInput("trace_boundary: degenerate contour");

    // Canonical start vertex: farthest from the centroid (a silhouette corner),
    // ties to the lowest index. Downstream samplers phase at vertex 0.
    Contour contour = normalize_ccw(Contour{std::move(merged), true});
    const Vec2 centroid = polygon_centroid(contour);
    std::size_t start = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < contour.vertices.size(); ++i) {
        const double d = norm2(contour.vertices[i] - centroid);
        if (d > best) {
            best = d;
            start = i;
        }
    }
    std::rotate(contour.vertices.begin(),
                contour.vertices.begin() + static_cast<std::ptrdiff_t>(start),
                contour.vertices.end());
    return contour;
}

}  // namespace

std::vector<RenderedInstance> render_instances(const std::vector<SceneObject>& scene,
                                               const RigCamera& camera, double oversample,
                                               int min_pixels) {
    const PolynomialFisheyeModel& model = camera.model;
    const int w = model.image_width();
    const int h = model.image_height();
    std::vector<double> depth(static_cast<std::size_t>(w) * h,
                              std::numeric_limits<double>::infinity());
    std::vector<int> ids(static_cast<std::size_t>(w) * h, -1);

    for (const SceneObject& obj : scene) {
        for (const Cuboid& part : obj.parts) {
            // Image-space footprint estimate sets the face sampling density.
            double extent_px = 0.0;
            bool any_visible = false;
            Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
            for (const Vec3& corner : cuboid_corners(part)) {
                const Vec3 pc = camera.pose.to_camera(corner);
                if (field_angle(pc) > model.max_field_angle()) continue;
                const Vec2 px = project_point(model, pc);
                any_visible = true;
                lo.x = std::min(lo.x, px.x);
                lo.y = std::min(lo.y, px.y);
                hi.x = std::max(hi.x, px.x);
                hi.y = std::max(hi.y, px.y);
            }
            if (!any_visible) continue;  // object behind camera or out of view
            extent_px = std::max(hi.x - lo.x, hi.y - lo.y);
            const int steps = std::clamp(static_cast<int>(std::ceil(extent_px * oversample)), 8, 700);

            for (const FaceGrid& face : cuboid_faces(part)) {
                for (int iu = 0; iu <= steps; ++iu) {
                    const double fu = static_cast<double>(iu) / steps;
                    const Vec3 row = face.origin + face.edge_u * fu;
                    for (int iv = 0; iv <= steps; ++iv) {
                        const double fv = static_cast<double>(iv) / steps;
                        const Vec3 p_vehicle = row + face.edge_v * fv;
                        const Vec3 pc = camera.pose.to_camera(p_vehicle);
                        const double dist = norm(pc);
                        if (dist < 1e-9 || field_angle(pc) > model.max_field_angle()) continue;
                        const Vec2 px = project_point(model, pc);
                        const int x = static_cast<int>(px.x);
                        const int y = static_cast<int>(px.y);
                        if (x < 0 || x >= w || y < 0 || y >= h) continue;
                        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                        if (dist < depth[idx]) {
                            depth[idx] = dist;
                            ids[idx] = obj.id;
                        }
                    }
                }
            }
        }
    }

    std::vector<RenderedInstance> out;
    for (const SceneObject& obj : scene) {
        BinaryMask mask = extract_component(ids, w, h, obj.id);
        if (mask.count() < min_pixels) {
            if (mask.count() > 0)
                std::fprintf(stderr, "render_instances: object %d below %d pixels, skipped\n",
                             obj.id, min_pixels);
            continue;
        }
        Contour contour = trace_boundary(mask);
        out.push_back({obj.id, obj.cls, std::move(contour), std::move(mask)});
    }
    return out;
}

std::vector<std::vector<Vec2>> render_open_cube(const RadialCameraModel& model, int grid_density,
                                                double half_size, int samples_per_line) {
    if (grid_density < 0) throw DegenerateInput("render_open_cube: negative grid density");
    const double L = half_size;
    // Cube [-L, L]^2 x [0, 2L] with the camera at the open face, looking in.
    const Vec3 c000{-L, -L, 0}, c100{L, -L, 0}, c010{-L, L, 0}, c110{L, L, 0};
    const Vec3 c001{-L, -L, 2 * L}, c101{L, -L, 2 * L}, c011{-L, L, 2 * L}, c111{L, L, 2 * L};

    std::vector<std::pair<Vec3, Vec3>> segments;
    // 12 edges.
    segments.assign({{c000, c100}, {c010, c110}, {c001, c101}, {c011, c111},
                     {c000, c010}, {c100, c110}, {c001, c011}, {c101, c111},
                     {c000, c001}, {c100, c101}, {c010, c011}, {c110, c111}});
    // Interior grid lines per face.
    for (int k = 1; k <= grid_density; ++k) {
        const double t = -L + 2.0 * L * k / (grid_density + 1);
        const double z = 2.0 * L * k / (grid_density + 1);
        // far face z = 2L
        segments.push_back({{t, -L, 2 * L}, {t, L, 2 * L}});
        segments.push_back({{-L, t, 2 * L}, {L, t, 2 * L}});
        // floor / ceiling y = +-L
        segments.push_back({{t, -L, 0}, {t, -L, 2 * L}});
        segments.push_back({{-L, -L, z}, {L, -L, z}});
        segments.push_back({{t, L, 0}, {t, L, 2 * L}});
        segments.push_back({{-L, L, z}, {L, L, z}});
        // walls x = +-L
        segments.push_back({{-L, t, 0}, {-L, t, 2 * L}});
        segments.push_back({{-L, -L, z}, {-L, L, z}});
        segments.push_back({{L, t, 0}, {L, t, 2 * L}});
        segments.push_back({{L, -L, z}, {L, L, z}});
    }

    std::vector<std::vector<Vec2>> curves;
    for (const auto& [a, b] : segments) {
        std::vector<Vec2> run;
        for (int k = 0; k < samples_per_line; ++k) {
            const double t = static_cast<double>(k) / (samples_per_line - 1);
            const Vec3 p = a + (b - a) * t;
            const double dist = norm(p);
            if (dist < 1e-9 || field_angle(p) > model.max_field_angle()) {
                if (run.size() >= 2) curves.push_back(std::move(run));
                run.clear();
                continue;
            }
            run.push_back(project_point(model, p));
        }
        if (run.size() >= 2) curves.push_back(std::move(run));
    }
    return curves;
}

AnnotationFile synthesize_annotations(const CameraRig& rig, const SynthOptions& opts) {
    AnnotationFile out;
    const std::size_t n_images = static_cast<std::size_t>(opts.n_scenes) * rig.cameras.size();
    out.images.resize(n_images);

    std::vector<std::vector<SceneObject>> scenes(opts.n_scenes);
    for (int s = 0; s < opts.n_scenes; ++s) {
        SceneConfig cfg = opts.scene_template;
        cfg.seed = opts.seed * 1000003ull + static_cast<std::uint64_t>(s);
        scenes[s] = generate_scene(cfg);
    }

    parallel_for(
        n_images,
        [&](std::size_t idx) {
            const int s = static_cast<int>(idx / rig.cameras.size());
            const std::size_t cam_idx = idx % rig.cameras.size();
            const RigCamera& cam = rig.cameras[cam_idx];

            char id[64];
            std::snprintf(id, sizeof(id), "scene%04d_%s", s, camera_id_name(cam.id));
            AnnotatedImage img;
            img.image_id = id;
            img.camera = cam.id;
            img.width = cam.model.image_width();
            img.height = cam.model.image_height();

            for (RenderedInstance& inst : render_instances(scenes[s], cam, opts.oversample)) {
                AnnotatedObject obj;
                obj.cls = inst.cls;
                obj.contour = std::move(inst.contour);
                img.objects.push_back(std::move(obj));
            }
            out.images[idx] = std::move(img);
        },
        opts.workers);
    return out;
}

}  // namespace fisheye
