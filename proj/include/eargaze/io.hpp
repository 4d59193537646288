#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eargaze/error.hpp"
#include "eargaze/types.hpp"

namespace eargaze::io {

namespace fs = std::filesystem;

enum class FormatIssue {
  missing_file,
  malformed_row,
  unknown_label,
  inconsistent_length,
  bad_sample_rate,
  non_monotonic,
  bad_metadata,
};

/// Load-time failure with the specific defect attached so callers (and tests)
/// can tell a bad row from a bad label.
class FormatError : public DataError {
 public:
  FormatError(FormatIssue issue, const std::string& what) : DataError(what), issue_(issue) {}
  FormatIssue issue() const noexcept { return issue_; }

 private:
  FormatIssue issue_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

struct VisualAngle {
  double horizontal_deg{0.0};
  double vertical_deg{0.0};
};

/// Pixel offset from the screen centre (right/up positive) to visual angle:
/// arctan(offset_mm / viewing_distance_mm) on each axis independently.
VisualAngle pixels_to_visual_angle(double x_px, double y_px, const ScreenGeometry& geom);
/// Exact inverse of pixels_to_visual_angle.
void visual_angle_to_pixels(const VisualAngle& angle, const ScreenGeometry& geom, double& x_px,
                            double& y_px);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Table read_table(const fs::path& path);
void write_table(const fs::path& path, const Table& table);

nlohmann::json read_json(const fs::path& path);
void write_json(const fs::path& path, const nlohmann::json& value);

ElectrodeLayout load_layout(const fs::path& path);
void write_layout(const ElectrodeLayout& layout, const fs::path& path);
nlohmann::json layout_to_json(const ElectrodeLayout& layout);
ElectrodeLayout layout_from_json(const nlohmann::json& value);

ScreenGeometry load_screen(const fs::path& path);
void write_screen(const ScreenGeometry& geom, const fs::path& path);

/// `<stem>.meta.json` next to a recording CSV.
fs::path metadata_path(const fs::path& csv_path);

Recording load_recording(const fs::path& path, const ElectrodeLayout& layout);
void write_recording(const Recording& recording, const fs::path& path);

/// Gaze CSV holds screen pixels (origin top-left, y down); the returned log
/// is in visual degrees relative to the screen centre, right/up positive.
GazeLog load_gaze_log(const fs::path& path, const ScreenGeometry& geom = ScreenGeometry::lab_default());
void write_gaze_log(const GazeLog& log, const fs::path& path,
                    const ScreenGeometry& geom = ScreenGeometry::lab_default());

}  // namespace eargaze::io
