#include "fisheye/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fisheye/errors.hpp"

namespace fisheye {

using json = nlohmann::ordered_json;

const Shape* AnnotatedObject::find_shape(const std::string& rep) const {
    for (const auto& [key, shape] : shapes)
        if (key == rep) return &shape;
    return nullptr;
}

void AnnotatedObject::set_shape(const std::string& rep, Shape shape) {
    for (auto& [key, value] : shapes) {
        if (key == rep) {
            value = std::move(shape);
            return;
        }
    }
    shapes.emplace_back(rep, std::move(shape));
    std::sort(shapes.begin(), shapes.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

void AnnotatedObject::set_iou(const std::string& rep, double iou) {
    for (auto& [key, value] : shape_ious) {
        if (key == rep) {
            value = iou;
            return;
        }
    }
    shape_ious.emplace_back(rep, iou);
    std::sort(shape_ious.begin(), shape_ious.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

namespace {

json vec2_to_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("expected a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json shape_to_json_value(const Shape& s) {
    json j;
    switch (shape_kind(s)) {
        case ShapeKind::standard_box: {
            const auto& b = std::get<StandardBox>(s);
            j["kind"] = "standard_box";
            j["center"] = vec2_to_json(b.center);
            j["width"] = b.width;
            j["height"] = b.height;
            break;
        }
        case ShapeKind::oriented_box: {
            const auto& b = std::get<OrientedBox>(s);
            j["kind"] = "oriented_box";
            j["center"] = vec2_to_json(b.center);
            j["width"] = b.width;
            j["height"] = b.height;
            j["angle"] = b.angle_deg;
            break;
        }
        case ShapeKind::ellipse: {
            const auto& e = std::get<EllipseShape>(s);
            j["kind"] = "ellipse";
            j["center"] = vec2_to_json(e.center);
            j["major"] = e.major_axis;
            j["minor"] = e.minor_axis;
            j["angle"] = e.angle_deg;
            break;
        }
        case ShapeKind::curved_box: {
            const auto& c = std::get<CurvedBox>(s);
            j["kind"] = "curved_box";
            j["circle_center"] = vec2_to_json(c.circle_center);
            j["r1"] = c.r1;
            j["r2"] = c.r2;
            j["theta1"] = c.theta1;
            j["theta2"] = c.theta2;
            j["degenerate"] = c.degenerate;
            j["degenerate_box"] = shape_to_json_value(Shape{c.degenerate_box});
            break;
        }
        case ShapeKind::vertex_polygon: {
            const auto& p = std::get<VertexPolygon>(s);
            j["kind"] = "vertex_polygon";
            j["origin"] = vec2_to_json(p.origin);
            json verts = json::array();
            for (const Vec2& v : p.vertices) verts.push_back(vec2_to_json(v));
            j["vertices"] = std::move(verts);
            j["sampling"] = p.sampling == PolygonSampling::adaptive ? "adaptive"
                                                                    : "uniform_perimeter";
            break;
        }
        case ShapeKind::polar_polygon: {
            const auto& p = std::get<PolarPolygon>(s);
            j["kind"] = "polar_polygon";
            j["center"] = vec2_to_json(p.center);
            json sectors = json::array();
            for (const auto& sec : p.sectors)
                sectors.push_back(json::array({sec.r, sec.theta, sec.alpha}));
            j["sectors"] = std::move(sectors);
            break;
        }
    }
    return j;
}

Shape shape_from_json_value(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "standard_box") {
        return StandardBox{vec2_from_json(j.at("center")), j.at("width").get<double>(),
                           j.at("height").get<double>()};
    }
    if (kind == "oriented_box") {
        return OrientedBox{vec2_from_json(j.at("center")), j.at("width").get<double>(),
                           j.at("height").get<double>(), j.at("angle").get<double>()};
    }
    if (kind == "ellipse") {
        return EllipseShape{vec2_from_json(j.at("center")), j.at("major").get<double>(),
                            j.at("minor").get<double>(), j.at("angle").get<double>()};
    }
    if (kind == "curved_box") {
        CurvedBox c;
        c.circle_center = vec2_from_json(j.at("circle_center"));
        c.r1 = j.at("r1").get<double>();
        c.r2 = j.at("r2").get<double>();
        c.theta1 = j.at("theta1").get<double>();
        c.theta2 = j.at("theta2").get<double>();
        c.degenerate = j.at("degenerate").get<bool>();
        c.degenerate_box = std::get<OrientedBox>(shape_from_json_value(j.at("degenerate_box")));
        return c;
    }
    if (kind == "vertex_polygon") {
        VertexPolygon p;
        p.origin = vec2_from_json(j.at("origin"));
        for (const auto& v : j.at("vertices")) p.vertices.push_back(vec2_from_json(v));
        p.sampling = j.at("sampling").get<std::string>() == "adaptive"
                         ? PolygonSampling::adaptive
                         : PolygonSampling::uniform_perimeter;
        return p;
    }
    if (kind == "polar_polygon") {
        PolarPolygon p;
        p.center = vec2_from_json(j.at("center"));
        for (const auto& sec : j.at("sectors")) {
            if (!sec.is_array() || sec.size() != 3)
                throw ParseError("polar_polygon sector must be [r, theta, alpha]");
            p.sectors.push_back({sec[0].get<double>(), sec[1].get<double>(), sec[2].get<int>()});
        }
        return p;
    }
    throw ParseError("unknown shape kind: " + kind);
}

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(std::string("malformed JSON in ") + what);
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << content;
}

}  // namespace

AnnotationFile annotations_from_json(const std::string& text) {
    const json root = parse_json(text, "annotation file");
    AnnotationFile out;
    if (!root.contains("version"))
        throw SchemaError("annotation file is missing the schema version");
    out.version = root.at("version").get<std::string>();
    if (out.version != kAnnotationSchemaVersion)
        throw SchemaError("unsupported annotation schema version \"" + out.version +
                          "\"; expected \"" + kAnnotationSchemaVersion + "\"");

    std::set<std::string> seen_ids;
    for (const auto& jimg : root.value("images", json::array())) {
        AnnotatedImage img;
        img.image_id = jimg.at("image_id").get<std::string>();
        if (!seen_ids.insert(img.image_id).second)
            throw SchemaError("duplicate image_id \"" + img.image_id + "\" appears twice");
        img.camera = camera_id_from_name(jimg.at("camera_id").get<std::string>());
        img.width = jimg.at("width").get<int>();
        img.height = jimg.at("height").get<int>();
        if (img.width <= 0 || img.height <= 0)
            throw SchemaError("image \"" + img.image_id + "\" has non-positive dimensions");

        int obj_index = 0;
        for (const auto& jobj : jimg.value("objects", json::array())) {
            AnnotatedObject obj;
            obj.cls = jobj.at("class").get<std::string>();
            std::vector<Vec2> verts;
            for (const auto& v : jobj.at("contour")) verts.push_back(vec2_from_json(v));
            obj.contour = make_contour(std::move(verts),
                                       img.image_id + " object " + std::to_string(obj_index));
            if (jobj.contains("shapes")) {
                for (const auto& [key, value] : jobj.at("shapes").items())
                    obj.set_shape(key, shape_from_json_value(value));
            }
            if (jobj.contains("iou")) {
                for (const auto& [key, value] : jobj.at("iou").items())
                    obj.set_iou(key, value.get<double>());
            }
            img.objects.push_back(std::move(obj));
            ++obj_index;
        }
        out.images.push_back(std::move(img));
    }
    return out;
}

std::string annotations_to_json(const AnnotationFile& file) {
    json root;
    root["version"] = file.version;
    json images = json::array();
    for (const AnnotatedImage& img : file.images) {
        json jimg;
        jimg["image_id"] = img.image_id;
        jimg["camera_id"] = camera_id_name(img.camera);
        jimg["width"] = img.width;
        jimg["height"] = img.height;
        json objects = json::array();
        for (const AnnotatedObject& obj : img.objects) {
            json jobj;
            jobj["class"] = obj.cls;
            json contour = json::array();
            for (const Vec2& v : obj.contour.vertices) contour.push_back(vec2_to_json(v));
            jobj["contour"] = std::move(contour);
            if (!obj.shapes.empty()) {
                json shapes;
                for (const auto& [key, shape] : obj.shapes)
                    shapes[key] = shape_to_json_value(shape);
                jobj["shapes"] = std::move(shapes);
            }
            if (!obj.shape_ious.empty()) {
                json ious;
                for (const auto& [key, iou] : obj.shape_ious) ious[key] = iou;
                jobj["iou"] = std::move(ious);
            }
            objects.push_back(std::move(jobj));
        }
        jimg["objects"] = std::move(objects);
        images.push_back(std::move(jimg));
    }
    root["images"] = std::move(images);
    return root.dump(2) + "\n";
}

AnnotationFile load_annotations(const std::string& path) {
    return annotations_from_json(read_file(path));
}

void save_annotations(const AnnotationFile& file, const std::string& path) {
    write_file(path, annotations_to_json(file));
}

PredictionFile predictions_from_json(const std::string& text) {
    const json root = parse_json(text, "prediction file");
    PredictionFile out;
    out.version = root.value("version", std::string(kAnnotationSchemaVersion));
    if (out.version != kAnnotationSchemaVersion)
        throw SchemaError("unsupported prediction schema version \"" + out.version + "\"");
    for (const auto& jdet : root.value("detections", json::array())) {
        PredictionEntry e;
        e.image_id = jdet.at("image_id").get<std::string>();
        e.cls = jdet.at("class").get<std::string>();
        e.confidence = jdet.at("confidence").get<double>();
        e.shape = shape_from_json_value(jdet.at("shape"));
        out.detections.push_back(std::move(e));
    }
    return out;
}

std::string predictions_to_json(const PredictionFile& file) {
    json root;
    root["version"] = file.version;
    json dets = json::array();
    for (const PredictionEntry& e : file.detections) {
        json jdet;
        jdet["image_id"] = e.image_id;
        jdet["class"] = e.cls;
        jdet["confidence"] = e.confidence;
        jdet["shape"] = shape_to_json_value(e.shape);
        dets.push_back(std::move(jdet));
    }
    root["detections"] = std::move(dets);
    return root.dump(2) + "\n";
}

PredictionFile load_predictions(const std::string& path) {
    return predictions_from_json(read_file(path));
}

void save_predictions(const PredictionFile& file, const std::string& path) {
    write_file(path, predictions_to_json(file));
}

CameraRig load_calibration(const std::string& path) {
    const json root = parse_json(read_file(path), "calibration file");
    CameraRig rig;
    std::set<std::string> seen;
    for (const auto& jcam : root.at("cameras")) {
        const std::string name = jcam.at("camera_id").get<std::string>();
        if (!seen.insert(name).second)
            throw SchemaError("duplicate camera_id \"" + name + "\" in calibration");
        const CameraId id = camera_id_from_name(name);

        const auto& jc = jcam.at("coefficients");
        if (!jc.is_array() || jc.size() != 4)
            throw SchemaError("camera \"" + name + "\": expected 4 polynomial coefficients");
        std::array<double, 4> coeffs{jc[0].get<double>(), jc[1].get<double>(),
                                     jc[2].get<double>(), jc[3].get<double>()};
        const Vec2 pp = vec2_from_json(jcam.at("principal_point"));
        const auto& jsize = jcam.at("image_size");
        const int w = jsize[0].get<int>();
        const int h = jsize[1].get<int>();
        const double max_theta = deg_to_rad(jcam.at("max_field_angle_deg").get<double>());

        const auto& jpose = jcam.at("pose");
        const auto& jt = jpose.at("translation");
        const Vec3 position{jt[0].get<double>(), jt[1].get<double>(), jt[2].get<double>()};
        const Pose pose = make_camera_pose(position, jpose.at("yaw_deg").get<double>(),
                                           jpose.at("pitch_down_deg").get<double>());

        rig.cameras.push_back(
            {id, pose, PolynomialFisheyeModel(coeffs, pp, w, h, max_theta)});
    }
    if (rig.cameras.empty()) throw SchemaError("calibration file lists no cameras");
    return rig;
}

SplitBucket split_bucket(const std::string& image_id, int train_pct, int val_pct) {
    // FNV-1a 64-bit over the image id.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : image_id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    const int bucket = static_cast<int>(h % 100);
    if (bucket < train_pct) return SplitBucket::train;
    if (bucket < train_pct + val_pct) return SplitBucket::val;
    return SplitBucket::test;
}

const char* split_bucket_name(SplitBucket b) {
    switch (b) {
        case SplitBucket::train: return "train";
        case SplitBucket::val: return "val";
        case SplitBucket::test: return "test";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (train_pct < 0 || val_pct < 0 || test_pct < 0 || train_pct + val_pct + test_pct != 100)
        throw SchemaError("RunConfig: split ratios must be non-negative and sum to 100, got " +
                          std::to_string(train_pct) + "/" + std::to_string(val_pct) + "/" +
                          std::to_string(test_pct));
    if (score_thresh < 0.0 || score_thresh > 1.0 || iou_thresh < 0.0 || iou_thresh > 1.0)
        throw SchemaError("RunConfig: thresholds must lie in [0, 1]");
}

SplitBucket RunConfig::bucket_of(const std::string& image_id) const {
    return split_bucket(image_id, train_pct, val_pct);
}

}  // namespace fisheye
