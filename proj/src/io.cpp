#include "eargaze/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace eargaze::io {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatIssue::missing_file, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
void for_each_line(const std::string& text, F&& f) {
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    ++line_no;
    if (!trim(line).empty()) f(line, line_no);
    start = end + 1;
  }
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
}

std::ofstream open_out(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

double number_field(const nlohmann::json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw FormatError(FormatIssue::bad_metadata, path.string() + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

std::string string_field(const nlohmann::json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw FormatError(FormatIssue::bad_metadata, path.string() + ": missing string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

VisualAngle pixels_to_visual_angle(double x_px, double y_px, const ScreenGeometry& geom) {
  return {std::atan(x_px * geom.pixel_pitch_mm / geom.viewing_distance_mm) * kDegPerRad,
          std::atan(y_px * geom.pixel_pitch_mm / geom.viewing_distance_mm) * kDegPerRad};
}

void visual_angle_to_pixels(const VisualAngle& angle, const ScreenGeometry& geom, double& x_px,
                            double& y_px) {
  x_px = geom.viewing_distance_mm * std::tan(angle.horizontal_deg / kDegPerRad) / geom.pixel_pitch_mm;
  y_px = geom.viewing_distance_mm * std::tan(angle.vertical_deg / kDegPerRad) / geom.pixel_pitch_mm;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError(FormatIssue::malformed_row, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

Table read_table(const fs::path& path) {
  const auto text = read_file(path);
  Table table;
  bool header = true;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto fields = split(line);
    if (header) {
      for (auto f : fields) table.header.emplace_back(f);
      header = false;
      return;
    }
    if (fields.size() != table.header.size()) {
      throw FormatError(FormatIssue::malformed_row, path.string() + ":" + std::to_string(line_no) +
                                                        ": expected " + std::to_string(table.header.size()) +
                                                        " fields, got " + std::to_string(fields.size()));
    }
    auto& row = table.rows.emplace_back();
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(f);
  });
  if (header) throw FormatError(FormatIssue::malformed_row, path.string() + ": empty file");
  return table;
}

void write_table(const fs::path& path, const Table& table) {
  auto out = open_out(path);
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(FormatIssue::bad_metadata, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json layout_to_json(const ElectrodeLayout& layout) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : layout.electrodes()) {
    list.push_back({{"label", e.label},
                    {"x_mm", e.position.x},
                    {"y_mm", e.position.y},
                    {"z_mm", e.position.z},
                    {"side", std::string(to_string(e.side))}});
  }
  return {{"electrodes", list}};
}

ElectrodeLayout layout_from_json(const nlohmann::json& value) {
  if (!value.contains("electrodes") || !value.at("electrodes").is_array()) {
    throw FormatError(FormatIssue::bad_metadata, "layout: missing 'electrodes' array");
  }
  std::vector<Electrode> electrodes;
  for (const auto& item : value.at("electrodes")) {
    Electrode e;
    e.label = string_field(item, "label", "layout");
    e.position = {number_field(item, "x_mm", "layout"), number_field(item, "y_mm", "layout"),
                  number_field(item, "z_mm", "layout")};
    e.side = parse_ear_side(string_field(item, "side", "layout"));
    electrodes.push_back(std::move(e));
  }
  return ElectrodeLayout(std::move(electrodes));
}

ElectrodeLayout load_layout(const fs::path& path) { return layout_from_json(read_json(path)); }

void write_layout(const ElectrodeLayout& layout, const fs::path& path) {
  write_json(path, layout_to_json(layout));
}

ScreenGeometry load_screen(const fs::path& path) {
  const auto j = read_json(path);
  ScreenGeometry g{number_field(j, "width_px", path), number_field(j, "height_px", path),
                   number_field(j, "pixel_pitch_mm", path), number_field(j, "viewing_distance_mm", path)};
  g.validate();
  return g;
}

void write_screen(const ScreenGeometry& geom, const fs::path& path) {
  write_json(path, {{"width_px", geom.width_px},
                    {"height_px", geom.height_px},
                    {"pixel_pitch_mm", geom.pixel_pitch_mm},
                    {"viewing_distance_mm", geom.viewing_distance_mm}});
}

fs::path metadata_path(const fs::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

Recording load_recording(const fs::path& path, const ElectrodeLayout& layout) {
  const auto meta_path = metadata_path(path);
  const auto meta = read_json(meta_path);
  Recording rec;
  rec.subject_id = string_field(meta, "subject_id", meta_path);
  rec.reference_label = string_field(meta, "reference_label", meta_path);
  rec.task_tag = string_field(meta, "task_tag", meta_path);
  rec.sample_rate = number_field(meta, "sample_rate_hz", meta_path);
  if (!(rec.sample_rate > 0.0) || !std::isfinite(rec.sample_rate)) {
    throw FormatError(FormatIssue::bad_sample_rate, meta_path.string() + ": sample rate must be positive");
  }

  const auto text = read_file(path);
  bool header = true;
  std::vector<bool> ended;
  double last_time = -INFINITY;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto fields = split(line);
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (header) {
      if (fields.empty() || fields.front() != "timestamp_s") {
        throw FormatError(FormatIssue::malformed_row, where + ": header must start with timestamp_s");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        std::string label(fields[i]);
        if (!is_gold_label(label) && !layout.contains(label)) {
          throw FormatError(FormatIssue::unknown_label, where + ": channel '" + label + "' not in layout");
        }
        if (label == rec.reference_label) {
          throw FormatError(FormatIssue::unknown_label, where + ": reference '" + label + "' listed as a channel");
        }
        for (const auto& existing : rec.labels) {
          if (existing == label) throw FormatError(FormatIssue::malformed_row, where + ": duplicate " + label);
        }
        rec.labels.push_back(std::move(label));
      }
      rec.channels.resize(rec.labels.size());
      ended.assign(rec.labels.size(), false);
      header = false;
      return;
    }
    if (fields.size() != rec.labels.size() + 1) {
      throw FormatError(FormatIssue::malformed_row, where + ": wrong field count");
    }
    const double t = parse_double(fields[0]);
    if (!(t > last_time)) throw FormatError(FormatIssue::malformed_row, where + ": timestamps not increasing");
    last_time = t;
    for (std::size_t c = 0; c < rec.labels.size(); ++c) {
      const auto cell = fields[c + 1];
      if (cell.empty()) {
        ended[c] = true;
        continue;
      }
      if (ended[c]) throw FormatError(FormatIssue::malformed_row, where + ": gap inside channel " + rec.labels[c]);
      const double v = parse_double(cell);
      if (!std::isfinite(v)) throw FormatError(FormatIssue::malformed_row, where + ": non-finite value");
      rec.channels[c].push_back(v);
    }
  });
  if (header) throw FormatError(FormatIssue::malformed_row, path.string() + ": empty file");
  for (const auto& ch : rec.channels) {
    if (ch.size() != rec.channels.front().size()) {
      throw FormatError(FormatIssue::inconsistent_length, path.string() + ": channels differ in length");
    }
  }
  return rec;
}

void write_recording(const Recording& recording, const fs::path& path) {
  if (!(recording.sample_rate > 0.0)) throw ValidationError("recording: sample rate must be positive");
  auto out = open_out(path);
  out << "timestamp_s";
  for (const auto& l : recording.labels) out << ',' << l;
  out << '\n';
  const auto n = recording.length();
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line = format_double(static_cast<double>(i) / recording.sample_rate);
    for (const auto& ch : recording.channels) {
      line += ',';
      line += format_double(ch[i]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed: " + path.string());
  write_json(metadata_path(path), {{"subject_id", recording.subject_id},
                                   {"sample_rate_hz", recording.sample_rate},
                                   {"reference_label", recording.reference_label},
                                   {"task_tag", recording.task_tag}});
}

GazeLog load_gaze_log(const fs::path& path, const ScreenGeometry& geom) {
  geom.validate();
  const auto table = read_table(path);
  if (table.header != std::vector<std::string>{"timestamp_s", "gaze_x_px", "gaze_y_px"}) {
    throw FormatError(FormatIssue::malformed_row, path.string() + ": unexpected gaze header");
  }
  GazeLog log;
  const auto meta_path = metadata_path(path);
  if (fs::exists(meta_path)) log.nominal_rate = number_field(read_json(meta_path), "nominal_rate_hz", meta_path);
  for (const auto& row : table.rows) {
    const double t = parse_double(row[0]);
    if (!log.timestamps.empty() && !(t > log.timestamps.back())) {
      throw FormatError(FormatIssue::non_monotonic, path.string() + ": timestamps not strictly increasing");
    }
    log.timestamps.push_back(t);
    if (row[1].empty() != row[2].empty()) {
      throw FormatError(FormatIssue::malformed_row, path.string() + ": half-missing gaze sample");
    }
    if (row[1].empty()) {
      log.horizontal.emplace_back();
      log.vertical.emplace_back();
      continue;
    }
    const double x = parse_double(row[1]) - geom.width_px / 2.0;
    const double y = geom.height_px / 2.0 - parse_double(row[2]);
    const auto angle = pixels_to_visual_angle(x, y, geom);
    log.horizontal.emplace_back(angle.horizontal_deg);
    log.vertical.emplace_back(angle.vertical_deg);
  }
  log.validate();
  return log;
}

void write_gaze_log(const GazeLog& log, const fs::path& path, const ScreenGeometry& geom) {
  log.validate();
  Table table{{"timestamp_s", "gaze_x_px", "gaze_y_px"}, {}};
  table.rows.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    auto& row = table.rows.emplace_back();
    row.push_back(format_double(log.timestamps[i]));
    if (!log.horizontal[i] || !log.vertical[i]) {
      row.emplace_back();
      row.emplace_back();
      continue;
    }
    double x = 0.0;
    double y = 0.0;
    visual_angle_to_pixels({*log.horizontal[i], *log.vertical[i]}, geom, x, y);
    row.push_back(format_double(x + geom.width_px / 2.0));
    row.push_back(format_double(geom.height_px / 2.0 - y));
  }
  write_table(path, table);
  write_json(metadata_path(path), {{"nominal_rate_hz", log.nominal_rate}});
}

}  // namespace eargaze::io
