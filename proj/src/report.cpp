#include "fisheye/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "fisheye/errors.hpp"

namespace fisheye {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kCameraColumns[kCameraCount] = {"Front", "Rear", "Left", "Right"};

std::string pct(double ratio, int objects) {
    if (objects <= 0) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * ratio);
    return buf;
}

}  // namespace

std::string emit_report(const EvaluationReport& report, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::csv) {
        os << "representation,front,rear,left,right,miou,params,objects\n";
        for (const RepresentationScore& row : report.rows) {
            os << representation_name(row.rep);
            for (int c = 0; c < kCameraCount; ++c)
                os << ',' << pct(row.miou_per_camera[c], row.objects_per_camera[c]);
            os << ',' << pct(row.miou, row.objects) << ',' << row.params << ',' << row.objects
               << '\n';
        }
    } else {
        os << "| Representation | Front | Rear | Left | Right | mIoU | No. of params | Objects |\n";
        os << "|---|---|---|---|---|---|---|---|\n";
        for (const RepresentationScore& row : report.rows) {
            os << "| " << representation_name(row.rep) << " |";
            for (int c = 0; c < kCameraCount; ++c)
                os << ' ' << pct(row.miou_per_camera[c], row.objects_per_camera[c]) << " |";
            os << ' ' << pct(row.miou, row.objects) << " | " << row.params << " | " << row.objects
               << " |\n";
        }
    }
    return os.str();
}

std::string emit_vertex_study(const std::vector<VertexStudyEntry>& entries, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::csv) {
        os << "vertices";
        for (const auto& e : entries) os << ',' << e.n;
        os << "\nmiou";
        for (const auto& e : entries) os << ',' << pct(e.miou, e.objects);
        os << '\n';
    } else {
        os << "| # Vertices |";
        for (const auto& e : entries) os << ' ' << e.n << " |";
        os << "\n|---|";
        for (std::size_t i = 0; i < entries.size(); ++i) os << "---|";
        os << "\n| mIoU |";
        for (const auto& e : entries) os << ' ' << pct(e.miou, e.objects) << " |";
        os << '\n';
    }
    return os.str();
}

std::string emit_ap_report(const ApReport& report, ReportFormat format) {
    std::ostringstream os;
    char buf[32];
    if (format == ReportFormat::csv) {
        os << "class,ap,ground_truth,predictions\n";
        for (const ClassAp& c : report.per_class) {
            std::snprintf(buf, sizeof(buf), "%.4f", c.ap);
            os << c.cls << ',' << buf << ',' << c.gt_count << ',' << c.prediction_count << '\n';
        }
        std::snprintf(buf, sizeof(buf), "%.4f", report.map);
        os << "mAP," << buf << ",,\n";
        os << "matched_iou";
        for (int c = 0; c < kCameraCount; ++c)
            os << ',' << pct(report.matched_iou_per_camera[c], report.matched_per_camera[c]);
        int total = 0;
        for (int c = 0; c < kCameraCount; ++c) total += report.matched_per_camera[c];
        os << ',' << pct(report.matched_miou, total) << '\n';
    } else {
        os << "| Class | AP | GT | Predictions |\n|---|---|---|---|\n";
        for (const ClassAp& c : report.per_class) {
            std::snprintf(buf, sizeof(buf), "%.4f", c.ap);
            os << "| " << c.cls << " | " << buf << " | " << c.gt_count << " | "
               << c.prediction_count << " |\n";
        }
        std::snprintf(buf, sizeof(buf), "%.4f", report.map);
        os << "| **mAP** | " << buf << " | | |\n\n";
        os << "| Matched IoU | Front | Rear | Left | Right | mIoU |\n|---|---|---|---|---|---|\n| |";
        int total = 0;
        for (int c = 0; c < kCameraCount; ++c) {
            os << ' ' << pct(report.matched_iou_per_camera[c], report.matched_per_camera[c])
               << " |";
            total += report.matched_per_camera[c];
        }
        os << ' ' << pct(report.matched_miou, total) << " |\n";
    }
    return os.str();
}

std::string report_to_json(const EvaluationReport& report) {
    json root;
    json rows = json::array();
    for (const RepresentationScore& row : report.rows) {
        json jr;
        jr["representation"] = representation_name(row.rep);
        json cams;
        for (int c = 0; c < kCameraCount; ++c) {
            json jc;
            jc["miou"] = row.miou_per_camera[c];
            jc["objects"] = row.objects_per_camera[c];
            cams[kCameraColumns[c]] = std::move(jc);
        }
        jr["cameras"] = std::move(cams);
        jr["miou"] = row.miou;
        jr["params"] = row.params;
        jr["objects"] = row.objects;
        jr["failed"] = row.failed;
        rows.push_back(std::move(jr));
    }
    root["rows"] = std::move(rows);
    return root.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw ParseError("malformed JSON in report file");
    EvaluationReport out;
    for (const auto& jr : root.at("rows")) {
        RepresentationScore row;
        row.rep = representation_from_name(jr.at("representation").get<std::string>());
        for (int c = 0; c < kCameraCount; ++c) {
            const auto& jc = jr.at("cameras").at(kCameraColumns[c]);
            row.miou_per_camera[c] = jc.at("miou").get<double>();
            row.objects_per_camera[c] = jc.at("objects").get<int>();
        }
        row.miou = jr.at("miou").get<double>();
        row.params = jr.at("params").get<int>();
        row.objects = jr.at("objects").get<int>();
        row.failed = jr.at("failed").get<int>();
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace fisheye
