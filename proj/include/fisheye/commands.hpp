#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fisheye/metrics.hpp"

namespace fisheye {

// Subcommand implementations used by the CLI binary. Each writes its outputs
// and returns a process exit code (0 ok, 2 data error, 3 numeric failure);
// usage errors are the caller's concern.

struct GenSynthOptions {
    std::string calibration_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    int n_scenes = 10;
    int objects_per_scene = 14;
    bool write_masks = true;
    bool write_previews = true;
    int workers = 0;
};
int cmd_gen_synth(const GenSynthOptions& opts);

struct FitOptions {
    std::string annotations_path;
    std::string out_path;
    std::vector<std::string> reps;  // empty = all representations
    bool lenient = false;
    int workers = 0;
};
int cmd_fit(const FitOptions& opts);

struct SampleOptions {
    std::string annotations_path;
    std::string out_path;
    std::string mode = "perimeter";  // angular | perimeter | adaptive
    int n = 24;
    bool lenient = false;
    int workers = 0;
};
int cmd_sample(const SampleOptions& opts);

struct EvalMiouOptions {
    std::string annotations_path;
    std::string out_dir;
    std::vector<std::string> reps;  // empty = all representations
    bool vertex_study = false;
    std::vector<int> vertex_counts = {4, 12, 24, 36, 60, 120};
    bool lenient = false;
    int workers = 0;
};
int cmd_eval_miou(const EvalMiouOptions& opts);

struct EvalMapOptions {
    std::string annotations_path;  // ground truth with fitted shapes
    std::string predictions_path;
    std::string rep = "standard";
    std::string out_dir;
    double iou_thresh = 0.5;
};
int cmd_eval_map(const EvalMapOptions& opts);

struct FitDivisionOptions {
    std::string calibration_path;
    std::string camera = "front";
    int samples = 256;
    std::string out_csv;  // residual-vs-angle table
};
int cmd_fit_division(const FitDivisionOptions& opts);

struct NmsOptions {
    std::string predictions_path;
    std::string out_path;
    double score_thresh = 0.25;
    double iou_thresh = 0.5;
};
int cmd_nms(const NmsOptions& opts);

struct ReportOptions {
    std::string report_path;  // report.json from eval-miou
    std::string format = "markdown";
    std::string out_path;  // empty = stdout
};
int cmd_report(const ReportOptions& opts);

struct RenderOptions {
    std::string annotations_path;
    std::string image_id;  // empty = all images
    std::string out_dir;
    std::vector<std::string> reps;
};
int cmd_render(const RenderOptions& opts);

}  // namespace fisheye
