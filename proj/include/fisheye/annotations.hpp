#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fisheye/camera.hpp"
#include "fisheye/geometry.hpp"
#include "fisheye/shapes.hpp"

namespace fisheye {

// Annotation schema version accepted by the loader.
inline constexpr const char* kAnnotationSchemaVersion = "1";

struct AnnotatedObject {
    std::string cls;
    Contour contour;
    // Fitted shapes keyed by representation name ("standard", "poly24", ...),
    // kept sorted by key for canonical serialization.
    std::vector<std::pair<std::string, Shape>> shapes;
    std::vector<std::pair<std::string, double>> shape_ious;

    const Shape* find_shape(const std::string& rep) const;
    void set_shape(const std::string& rep, Shape shape);
    void set_iou(const std::string& rep, double iou);
};

struct AnnotatedImage {
    std::string image_id;
    CameraId camera = CameraId::front;
    int width = 0;
    int height = 0;
    std::vector<AnnotatedObject> objects;
};

struct AnnotationFile {
    std::string version = kAnnotationSchemaVersion;
    std::vector<AnnotatedImage> images;
};

AnnotationFile annotations_from_json(const std::string& text);
std::string annotations_to_json(const AnnotationFile& file);
AnnotationFile load_annotations(const std::string& path);
void save_annotations(const AnnotationFile& file, const std::string& path);

struct PredictionEntry {
    std::string image_id;
    std::string cls;
    double confidence = 0.0;
    Shape shape;
};

struct PredictionFile {
    std::string version = kAnnotationSchemaVersion;
    std::vector<PredictionEntry> detections;
};

PredictionFile predictions_from_json(const std::string& text);
std::string predictions_to_json(const PredictionFile& file);
PredictionFile load_predictions(const std::string& path);
void save_predictions(const PredictionFile& file, const std::string& path);

CameraRig load_calibration(const std::string& path);

// Deterministic dataset split on the image id hash.
enum class SplitBucket { train, val, test };
SplitBucket split_bucket(const std::string& image_id, int train_pct = 60, int val_pct = 10);
const char* split_bucket_name(SplitBucket b);

// Shared run configuration for evaluation drivers.
struct RunConfig {
    std::string calibration_path;
    int train_pct = 60;
    int val_pct = 10;
    int test_pct = 30;
    std::vector<std::string> representations;
    double score_thresh = 0.25;
    double iou_thresh = 0.5;
    std::string output_dir;

    // Throws SchemaError unless the split ratios sum to 100.
    void validate() const;
    SplitBucket bucket_of(const std::string& image_id) const;
};

}  // namespace fisheye
