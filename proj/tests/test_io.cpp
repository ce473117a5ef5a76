#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "fisheye/annotations.hpp"
#include "fisheye/commands.hpp"
#include "fisheye/errors.hpp"
#include "fisheye/metrics.hpp"
#include "fisheye/overlay.hpp"
#include "fisheye/report.hpp"

using namespace fisheye;
namespace fs = std::filesystem;

namespace {

std::string minimal_annotation_json() {
    return R"({
  "version": "1",
  "images": [
    {
      "image_id": "img0",
      "camera_id": "front",
      "width": 100,
      "height": 80,
      "objects": [
        {"class": "vehicle", "contour": [[10, 10], [40, 12], [30, 40]]}
      ]
    }
  ]
})";
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("a minimal annotation file loads") {
    const AnnotationFile file = annotations_from_json(minimal_annotation_json());
    REQUIRE(file.images.size() == 1);
    CHECK(file.images[0].image_id == "img0");
    CHECK(file.images[0].camera == CameraId::front);
    REQUIRE(file.images[0].objects.size() == 1);
    CHECK(file.images[0].objects[0].contour.vertices.size() == 3);
}

TEST_CASE("duplicate image ids are rejected with the id named") {
    const std::string json = R"({
      "version": "1",
      "images": [
        {"image_id": "dup", "camera_id": "front", "width": 10, "height": 10, "objects": []},
        {"image_id": "dup", "camera_id": "rear", "width": 10, "height": 10, "objects": []}
      ]})";
    try {
        annotations_from_json(json);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("dup") != std::string::npos);
    }
}

TEST_CASE("two-vertex contours are rejected with the object named") {
    const std::string json = R"({
      "version": "1",
      "images": [
        {"image_id": "imgX", "camera_id": "front", "width": 10, "height": 10,
         "objects": [{"class": "vehicle", "contour": [[1, 1], [2, 2]]}]}
      ]})";
    try {
        annotations_from_json(json);
        FAIL("expected InvalidContour");
    } catch (const InvalidContour& e) {
        const std::string what = e.what();
        CHECK(what.find("imgX") != std::string::npos);
        CHECK(what.find("object 0") != std::string::npos);
    }
}

TEST_CASE("unknown schema versions are rejected") {
    const std::string json = R"({"version": "2", "images": []})";
    CHECK_THROWS_AS(annotations_from_json(json), SchemaError);
    CHECK_THROWS_AS(annotations_from_json("not json at all"), ParseError);
}

TEST_CASE("load, save, load is a fixed point") {
    AnnotationFile file = annotations_from_json(minimal_annotation_json());
    // Add one of every shape kind to exercise the serializers.
    AnnotatedObject& obj = file.images[0].objects[0];
    obj.set_shape("standard", StandardBox{{25.25, 20.125}, 30.5, 28.0});
    obj.set_shape("oriented", OrientedBox{{25, 20}, 30, 28, -31.75});
    obj.set_shape("ellipse", EllipseShape{{25, 20}, 31, 12, 14.5});
    CurvedBox cb;
    cb.circle_center = {100.5, -40.25};
    cb.r1 = 80.1;
    cb.r2 = 95.7;
    cb.theta1 = 0.31;
    cb.theta2 = 1.12;
    cb.degenerate_box = OrientedBox{{25, 20}, 30, 28, -31.75};
    obj.set_shape("curved", cb);
    VertexPolygon poly;
    poly.origin = {26.6, 21.4};
    poly.vertices = {{-10, -8}, {12, -6}, {4, 14}, {-8, 9}};
    obj.set_shape("poly4", poly);
    PolarPolygon polar;
    polar.center = {26.6, 21.4};
    polar.sectors = {{10.5, 0.1, 1}, {12.25, 1.7, 2}, {9.0, 3.3, 0}, {11.0, 4.9, 1}};
    obj.set_shape("polar4", polar);
    obj.set_iou("standard", 0.8125);

    const std::string once = annotations_to_json(file);
    const AnnotationFile reloaded = annotations_from_json(once);
    const std::string twice = annotations_to_json(reloaded);
    CHECK(once == twice);
}

TEST_CASE("prediction files round trip") {
    PredictionFile preds;
    preds.detections.push_back({"img0", "vehicle", 0.875, Shape{StandardBox{{10, 10}, 5, 8}}});
    preds.detections.push_back(
        {"img1", "vehicle", 0.5, Shape{EllipseShape{{40, 30}, 22, 10, 12.0}}});
    const std::string text = predictions_to_json(preds);
    const PredictionFile reloaded = predictions_from_json(text);
    REQUIRE(reloaded.detections.size() == 2);
    CHECK(reloaded.detections[0].confidence == 0.875);
    CHECK(predictions_to_json(reloaded) == text);
}

TEST_CASE("split buckets are deterministic and roughly 60/10/30") {
    int train = 0, val = 0, test = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::string id = "image_" + std::to_string(i);
        const SplitBucket b = split_bucket(id);
        CHECK(split_bucket(id) == b);
        if (b == SplitBucket::train) ++train;
        else if (b == SplitBucket::val) ++val;
        else ++test;
    }
    CHECK(std::abs(train - 6000) < 300);
    CHECK(std::abs(val - 1000) < 150);
    CHECK(std::abs(test - 3000) < 300);
}

TEST_CASE("overlay renders shape-appropriate SVG elements") {
    AnnotationFile file = annotations_from_json(minimal_annotation_json());
    AnnotatedObject& obj = file.images[0].objects[0];
    obj.set_shape("standard", StandardBox{{25, 20}, 30, 28});
    CurvedBox cb;
    cb.circle_center = {50, 200};
    cb.r1 = 150;
    cb.r2 = 180;
    cb.theta1 = -2.2;
    cb.theta2 = -1.2;
    obj.set_shape("curved", cb);
    VertexPolygon poly24;
    poly24.origin = {25, 20};
    for (int i = 0; i < 24; ++i)
        poly24.vertices.push_back(unit_from_angle(2.0 * kPi * i / 24) * 10.0);
    obj.set_shape("poly24", poly24);

    const std::vector<std::string> reps{"standard", "curved", "poly24"};
    OverlayStyle style;
    style.draw_contours = false;
    const std::string svg = render_overlay(file.images[0], reps, style);

    CHECK(count_occurrences(svg, "<rect") == 2);  // background + the standard box
    CHECK(count_occurrences(svg, "<path") == 1);
    CHECK(count_occurrences(svg, " A ") == 2);  // two arc segments
    CHECK(count_occurrences(svg, " L ") == 2);  // two radial segments
    const std::size_t poly_pos = svg.find("<polygon");
    REQUIRE(poly_pos != std::string::npos);
    const std::size_t poly_end = svg.find("\"/>", poly_pos);
    const std::string points = svg.substr(poly_pos, poly_end - poly_pos);
    CHECK(count_occurrences(points, ",") == 24);

    // Deterministic bytes.
    CHECK(render_overlay(file.images[0], reps, style) == svg);
    // Balanced document structure.
    CHECK(count_occurrences(svg, "<g ") == count_occurrences(svg, "</g>"));
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("capacity report emits the Table-II row order and n/a columns") {
    EvaluationReport report;
    for (Representation rep : default_representations()) {
        RepresentationScore row;
        row.rep = rep;
        row.miou_per_camera = {0.5, 0.0, 0.0, 0.0};
        row.objects_per_camera = {10, 0, 0, 0};  // single-camera dataset
        row.miou = 0.5;
        row.objects = 10;
        row.params = representation_name(rep) == std::string("standard") ? 4 : 5;
        report.rows.push_back(row);
    }
    const std::string md = emit_report(report, ReportFormat::markdown);
    const std::size_t pos_standard = md.find("| standard |");
    const std::size_t pos_curved = md.find("| curved |");
    const std::size_t pos_oriented = md.find("| oriented |");
    const std::size_t pos_ellipse = md.find("| ellipse |");
    const std::size_t pos_poly4 = md.find("| poly4 |");
    const std::size_t pos_poly24 = md.find("| poly24 |");
    const std::size_t pos_adaptive = md.find("| poly24-adaptive |");
    CHECK(pos_standard < pos_curved);
    CHECK(pos_curved < pos_oriented);
    CHECK(pos_oriented < pos_ellipse);
    CHECK(pos_ellipse < pos_poly4);
    CHECK(pos_poly4 < pos_poly24);
    CHECK(pos_poly24 < pos_adaptive);
    CHECK(md.find("n/a") != std::string::npos);  // absent cameras

    const std::string csv = emit_report(report, ReportFormat::csv);
    CHECK(csv.rfind("representation,front,rear,left,right,miou,params,objects", 0) == 0);

    // Empty dataset: header only with zero counts.
    const EvaluationReport empty;
    const std::string empty_csv = emit_report(empty, ReportFormat::csv);
    CHECK(count_occurrences(empty_csv, "\n") == 1);
}

TEST_CASE("report JSON round trips") {
    EvaluationReport report;
    RepresentationScore row;
    row.rep = Representation::poly24;
    row.miou_per_camera = {0.9, 0.8, 0.7, 0.6};
    row.objects_per_camera = {5, 6, 7, 8};
    row.miou = 0.75;
    row.objects = 26;
    row.params = 48;
    report.rows.push_back(row);
    const std::string json = report_to_json(report);
    const EvaluationReport reloaded = report_from_json(json);
    REQUIRE(reloaded.rows.size() == 1);
    CHECK(reloaded.rows[0].miou == 0.75);
    CHECK(report_to_json(reloaded) == json);
}

TEST_CASE("the CLI command pipeline runs end to end") {
    const fs::path dir = fs::temp_directory_path() / "fisheye_io_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    GenSynthOptions gen;
    gen.calibration_path = "data/calibration.json";
    gen.out_dir = (dir / "synth").string();
    gen.seed = 99;
    gen.n_scenes = 2;
    gen.write_masks = true;
    gen.write_previews = true;
    CHECK(cmd_gen_synth(gen) == 0);
    CHECK(fs::exists(dir / "synth" / "annotations.json"));
    CHECK(fs::exists(dir / "synth" / "masks"));
    CHECK(fs::exists(dir / "synth" / "previews"));

    FitOptions fit;
    fit.annotations_path = (dir / "synth" / "annotations.json").string();
    fit.out_path = (dir / "fits.json").string();
    fit.lenient = true;
    CHECK(cmd_fit(fit) == 0);
    const AnnotationFile fits = load_annotations(fit.out_path);
    bool has_fit = false;
    for (const auto& img : fits.images)
        for (const auto& obj : img.objects)
            if (obj.find_shape("poly24") != nullptr) has_fit = true;
    CHECK(has_fit);

    SampleOptions sample;
    sample.annotations_path = fit.out_path;
    sample.out_path = (dir / "sampled.json").string();
    sample.mode = "adaptive";
    sample.n = 12;
    sample.lenient = true;
    CHECK(cmd_sample(sample) == 0);

    EvalMiouOptions miou;
    miou.annotations_path = fit.out_path;
    miou.out_dir = (dir / "eval").string();
    miou.lenient = true;
    CHECK(cmd_eval_miou(miou) == 0);
    CHECK(fs::exists(dir / "eval" / "report.json"));
    CHECK(fs::exists(dir / "eval" / "report.csv"));
    CHECK(fs::exists(dir / "eval" / "report.md"));

    ReportOptions rep;
    rep.report_path = (dir / "eval" / "report.json").string();
    rep.format = "csv";
    rep.out_path = (dir / "report_again.csv").string();
    CHECK(cmd_report(rep) == 0);
    CHECK(fs::exists(dir / "report_again.csv"));

    // Ground truth as predictions: mAP must be exactly 1.
    PredictionFile preds;
    for (const auto& img : fits.images)
        for (const auto& obj : img.objects)
            if (const Shape* s = obj.find_shape("standard"))
                preds.detections.push_back({img.image_id, obj.cls, 1.0, *s});
    save_predictions(preds, (dir / "preds.json").string());

    NmsOptions nms;
    nms.predictions_path = (dir / "preds.json").string();
    nms.out_path = (dir / "preds_nms.json").string();
    CHECK(cmd_nms(nms) == 0);

    EvalMapOptions map_opts;
    map_opts.annotations_path = fit.out_path;
    map_opts.predictions_path = (dir / "preds.json").string();
    map_opts.rep = "standard";
    map_opts.out_dir = (dir / "map").string();
    CHECK(cmd_eval_map(map_opts) == 0);
    std::ifstream map_csv(dir / "map" / "map_report.csv");
    std::string map_text((std::istreambuf_iterator<char>(map_csv)),
                         std::istreambuf_iterator<char>());
    CHECK(map_text.find("mAP,1.0000") != std::string::npos);

    RenderOptions render;
    render.annotations_path = fit.out_path;
    render.image_id = fits.images[0].image_id;
    render.out_dir = (dir / "overlays").string();
    CHECK(cmd_render(render) == 0);
    CHECK(fs::exists(dir / "overlays" / (fits.images[0].image_id + ".svg")));

    fs::remove_all(dir);
}

TEST_CASE("fit-division command prints and writes residuals") {
    const fs::path dir = fs::temp_directory_path() / "fisheye_io_test2";
    fs::create_directories(dir);
    FitDivisionOptions opts;
    opts.calibration_path = "data/calibration.json";
    opts.camera = "front";
    opts.samples = 64;
    opts.out_csv = (dir / "residuals.csv").string();
    CHECK(cmd_fit_division(opts) == 0);
    std::ifstream csv(dir / "residuals.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "theta_rad,theta_deg,residual_px");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 64);
    fs::remove_all(dir);
}

TEST_CASE("run config validates split ratios") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.bucket_of("image_1") == split_bucket("image_1"));
    cfg.val_pct = 20;
    CHECK_THROWS_AS(cfg.validate(), SchemaError);
    cfg.val_pct = 10;
    cfg.iou_thresh = 1.5;
    CHECK_THROWS_AS(cfg.validate(), SchemaError);
}
