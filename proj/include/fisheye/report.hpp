#pragma once

#include <string>

#include "fisheye/metrics.hpp"

namespace fisheye {

enum class ReportFormat { csv, markdown };

// Capacity table: Representation | Front Rear Left Right | mIoU | params | objects.
std::string emit_report(const EvaluationReport& report, ReportFormat format);

std::string emit_vertex_study(const std::vector<VertexStudyEntry>& entries, ReportFormat format);

std::string emit_ap_report(const ApReport& report, ReportFormat format);

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

}  // namespace fisheye
