#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fisheye/commands.hpp"
#include "fisheye/errors.hpp"

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Fisheye object-detection shape toolkit"};
    app.require_subcommand(1);

    fisheye::GenSynthOptions gen;
    auto* cmd_gen = app.add_subcommand("gen-synth", "Generate a synthetic fisheye dataset");
    cmd_gen->add_option("--calib", gen.calibration_path, "Calibration JSON")->required();
    cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();
    cmd_gen->add_option("--seed", gen.seed, "RNG seed");
    cmd_gen->add_option("--images", gen.n_scenes, "Number of scenes (4 images each)");
    cmd_gen->add_option("--objects", gen.objects_per_scene, "Objects per scene");
    cmd_gen->add_flag("!--no-masks", gen.write_masks, "Skip PGM masks");
    cmd_gen->add_flag("!--no-previews", gen.write_previews, "Skip SVG previews");

    fisheye::FitOptions fit;
    auto* cmd_fit = app.add_subcommand("fit", "Fit representations to instance contours");
    cmd_fit->add_option("--annotations", fit.annotations_path, "Annotation JSON")->required();
    cmd_fit->add_option("--out", fit.out_path, "Output annotation JSON with fits")->required();
    cmd_fit->add_option("--reps", fit.reps, "Representations (default: all)")->delimiter(',');
    cmd_fit->add_flag("--lenient", fit.lenient, "Skip objects whose fit fails");

    fisheye::SampleOptions sample;
    auto* cmd_sample = app.add_subcommand("sample", "Sample polygon vertices from contours");
    cmd_sample->add_option("--annotations", sample.annotations_path, "Annotation JSON")->required();
    cmd_sample->add_option("--out", sample.out_path, "Output annotation JSON")->required();
    cmd_sample->add_option("--mode", sample.mode, "angular|perimeter|adaptive")->required();
    cmd_sample->add_option("--n", sample.n, "Vertex count");
    cmd_sample->add_flag("--lenient", sample.lenient, "Skip objects that fail");

    fisheye::EvalMiouOptions miou;
    auto* cmd_miou = app.add_subcommand("eval-miou", "Representation-capacity mIoU report");
    cmd_miou->add_option("--annotations", miou.annotations_path, "Annotation JSON")->required();
    cmd_miou->add_option("--out", miou.out_dir, "Output directory")->required();
    cmd_miou->add_option("--reps", miou.reps, "Representations (default: all)")->delimiter(',');
    cmd_miou->add_flag("--vertex-study", miou.vertex_study, "Also run the vertex-count study");
    cmd_miou->add_flag("--lenient", miou.lenient, "Skip objects whose fit fails");

    fisheye::EvalMapOptions map_opts;
    auto* cmd_map = app.add_subcommand("eval-map", "Average-precision report");
    cmd_map->add_option("--annotations", map_opts.annotations_path, "Ground truth with fits")
        ->required();
    cmd_map->add_option("--predictions", map_opts.predictions_path, "Prediction JSON")->required();
    cmd_map->add_option("--rep", map_opts.rep, "Ground-truth representation key");
    cmd_map->add_option("--out", map_opts.out_dir, "Output directory")->required();
    cmd_map->add_option("--iou-thresh", map_opts.iou_thresh, "Match threshold");

    fisheye::FitDivisionOptions div;
    auto* cmd_div = app.add_subcommand("fit-division", "Fit the division model to a calibration");
    cmd_div->add_option("--calib", div.calibration_path, "Calibration JSON")->required();
    cmd_div->add_option("--camera", div.camera, "Camera id (front|rear|left|right)");
    cmd_div->add_option("--samples", div.samples, "Field-angle sample count");
    cmd_div->add_option("--out", div.out_csv, "Residual-vs-angle CSV");

    fisheye::NmsOptions nms;
    auto* cmd_nms = app.add_subcommand("nms", "Non-maximum suppression over predictions");
    cmd_nms->add_option("--predictions", nms.predictions_path, "Prediction JSON")->required();
    cmd_nms->add_option("--out", nms.out_path, "Filtered prediction JSON")->required();
    cmd_nms->add_option("--score-thresh", nms.score_thresh, "Confidence threshold");
    cmd_nms->add_option("--iou-thresh", nms.iou_thresh, "Suppression IoU threshold");

    fisheye::ReportOptions rep;
    auto* cmd_rep = app.add_subcommand("report", "Format a saved evaluation report");
    cmd_rep->add_option("--report", rep.report_path, "report.json from eval-miou")->required();
    cmd_rep->add_option("--format", rep.format, "csv|markdown");
    cmd_rep->add_option("--out", rep.out_path, "Output file (default stdout)");

    fisheye::RenderOptions render;
    auto* cmd_render = app.add_subcommand("render", "Render SVG overlays of fitted shapes");
    cmd_render->add_option("--annotations", render.annotations_path, "Annotation JSON with fits")
        ->required();
    cmd_render->add_option("--image-id", render.image_id, "Single image id (default: all)");
    cmd_render->add_option("--out", render.out_dir, "Output directory")->required();
    cmd_render->add_option("--reps", render.reps, "Representations to draw")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or the help text
        return code == 0 ? 0 : 1;
    }

    if (cmd_gen->parsed()) return fisheye::cmd_gen_synth(gen);
    if (cmd_fit->parsed()) return fisheye::cmd_fit(fit);
    if (cmd_sample->parsed()) return fisheye::cmd_sample(sample);
    if (cmd_miou->parsed()) return fisheye::cmd_eval_miou(miou);
    if (cmd_map->parsed()) return fisheye::cmd_eval_map(map_opts);
    if (cmd_div->parsed()) return fisheye::cmd_fit_division(div);
    if (cmd_nms->parsed()) return fisheye::cmd_nms(nms);
    if (cmd_rep->parsed()) return fisheye::cmd_report(rep);
    if (cmd_render->parsed()) return fisheye::cmd_render(render);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fisheye::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
