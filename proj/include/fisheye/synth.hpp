#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fisheye/annotations.hpp"
#include "fisheye/camera.hpp"
#include "fisheye/geometry.hpp"

namespace fisheye {

struct SceneConfig {
    std::uint64_t seed = 1;
    int n_objects = 14;
    double min_length = 3.0, max_length = 5.6;  // body size ranges, meters
    double min_width = 1.6, max_width = 2.2;
    double min_height = 1.5, max_height = 2.3;
    double placement_min_radius = 3.0;  // ground-plane ring around the ego car
    double placement_max_radius = 19.0;
    int max_retries = 2000;
    bool compound = true;    // vehicles composed of body + cabin parts
    bool parked_rows = true;  // flanking parked rows (false: ring placement only)
};

// Axis-aligned-in-yaw cuboid resting on the ground plane (z up).
struct Cuboid {
    Vec3 center;
    Vec3 half_extents;
    double yaw_rad = 0.0;
};

struct SceneObject {
    int id = 0;
    std::string cls = "vehicle";
    std::vector<Cuboid> parts;
};

// Deterministic for a fixed seed; object footprints do not interpenetrate
// (rejection sampling, throws PlacementFailed when the region is saturated).
std::vector<SceneObject> generate_scene(const SceneConfig& cfg);

struct RenderedInstance {
    int object_id = 0;
    std::string cls;
    Contour contour;  // outer boundary, pixel corners of the visible mask
    BinaryMask mask;  // visible region (largest component, holes filled)
};

// Projects dense cuboid surface samples through the camera with a per-pixel
// depth test; fully occluded or out-of-view objects are dropped.
std::vector<RenderedInstance> render_instances(const std::vector<SceneObject>& scene,
                                               const RigCamera& camera,
                                               double oversample = 2.0,
                                               int min_pixels = 16);

// Projected grid lines of an open cube around the camera (12 edges plus
// grid_density interior lines per face direction). Each polyline is one
// in-view run of a source line.
std::vector<std::vector<Vec2>> render_open_cube(const RadialCameraModel& model, int grid_density,
                                                double half_size = 2.0, int samples_per_line = 256);

struct SynthOptions {
    std::uint64_t seed = 1;
    int n_scenes = 10;
    SceneConfig scene_template;
    double oversample = 2.0;
    int workers = 0;
};

// Renders n_scenes through every rig camera into an annotation set; image ids
// are "scene<k>_<camera>".
AnnotationFile synthesize_annotations(const CameraRig& rig, const SynthOptions& opts);

}  // namespace fisheye
