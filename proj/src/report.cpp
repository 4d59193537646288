#include "eargaze/report.hpp"

#include "eargaze/error.hpp"
#include "eargaze/io.hpp"

namespace eargaze::report {

namespace {

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json test_to_json(const montage::SignificanceTest& t) {
  json matrix = json::array();
  for (const auto& row : t.posthoc.p_matrix) {
    json r = json::array();
    for (const auto& v : row) r.push_back(optional_to_json(v));
    matrix.push_back(std::move(r));
  }
  return {{"friedman_statistic", t.friedman_statistic},
          {"friedman_p", t.friedman_p},
          {"subjects_used", t.subjects_used},
          {"posthoc",
           {{"computed", t.posthoc.computed},
            {"reason", t.posthoc.reason},
            {"degenerate_pairs", t.posthoc.degenerate_pairs},
            {"p_matrix", t.posthoc.computed ? matrix : json(nullptr)}}}};
}

montage::SignificanceTest test_from_json(const json& v) {
  montage::SignificanceTest t;
  t.friedman_statistic = v.at("friedman_statistic").get<double>();
  t.friedman_p = v.at("friedman_p").get<double>();
  t.subjects_used = v.at("subjects_used").get<int>();
  const auto& ph = v.at("posthoc");
  t.posthoc.computed = ph.at("computed").get<bool>();
  t.posthoc.reason = ph.at("reason").get<std::string>();
  t.posthoc.degenerate_pairs = ph.at("degenerate_pairs").get<int>();
  if (!ph.at("p_matrix").is_null()) {
    for (const auto& row : ph.at("p_matrix")) {
      std::vector<std::optional<double>> r;
      for (const auto& x : row) r.push_back(optional_from_json(x));
      t.posthoc.p_matrix.push_back(std::move(r));
    }
  }
  return t;
}

std::vector<std::string> expect_header(const io::Table& table, const std::vector<std::string>& header,
                                       const fs::path& path) {
  if (table.header != header) {
    throw io::FormatError(io::FormatIssue::malformed_row, path.string() + ": unexpected header");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != header.size()) {
      throw io::FormatError(io::FormatIssue::malformed_row,
                            path.string() + " row " + std::to_string(r + 2) + ": field count");
    }
  }
  return header;
}

template <typename T>
T parse_integer(const std::string& text, const fs::path& path) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw io::FormatError(io::FormatIssue::malformed_row, path.string() + ": bad integer '" + text + "'");
  }
}

bool parse_flag(const std::string& text, const fs::path& path) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw io::FormatError(io::FormatIssue::malformed_row, path.string() + ": flag must be 0 or 1");
}

const std::string& fmt_flag(bool b) {
  static const std::string one = "1", zero = "0";
  return b ? one : zero;
}

}  // namespace

std::string_view to_string(montage::Aggregation aggregation) noexcept {
  return aggregation == montage::Aggregation::pooled ? "pooled" : "within_subject";
}

montage::Aggregation parse_aggregation(std::string_view text) {
  if (text == "within_subject") return montage::Aggregation::within_subject;
  if (text == "pooled") return montage::Aggregation::pooled;
  throw ValidationError("unknown aggregation '" + std::string(text) + "'");
}

json to_json(const montage::CorrelationReport& report) {
  json montages = json::array();
  for (const auto& m : report.montages) {
    json se = json::array(), sc = json::array();
    for (const auto& v : m.subject_r_eog) se.push_back(optional_to_json(v));
    for (const auto& v : m.subject_r_cam) sc.push_back(optional_to_json(v));
    montages.push_back({{"montage", m.montage.name()},
                        {"a", m.montage.a},
                        {"b", m.montage.b},
                        {"mean_r_eog", m.mean_r_eog},
                        {"mean_r_cam", m.mean_r_cam},
                        {"sd_r_eog", m.sd_r_eog},
                        {"sd_r_cam", m.sd_r_cam},
                        {"polarity_eog", m.polarity_eog},
                        {"polarity_cam", m.polarity_cam},
                        {"label_eog", montage::format_r(m.mean_r_eog)},
                        {"subject_r_eog", se},
                        {"subject_r_cam", sc},
                        {"excluded_trials", m.excluded_trials}});
  }
  return {{"axis", to_string(report.axis)},
          {"aggregation", to_string(report.aggregation)},
          {"subjects", report.subjects},
          {"trials", report.trials},
          {"excluded_trials", report.excluded_trials},
          {"montages", montages},
          {"significance_eog", report.eog ? test_to_json(*report.eog) : json(nullptr)},
          {"significance_cam", report.cam ? test_to_json(*report.cam) : json(nullptr)}};
}

montage::CorrelationReport correlation_report_from_json(const json& value) {
  montage::CorrelationReport r;
  r.axis = parse_axis(value.at("axis").get<std::string>());
  r.aggregation = parse_aggregation(value.at("aggregation").get<std::string>());
  r.subjects = value.at("subjects").get<std::vector<std::string>>();
  r.trials = value.at("trials").get<int>();
  r.excluded_trials = value.at("excluded_trials").get<int>();
  for (const auto& m : value.at("montages")) {
    montage::MontageScore s;
    s.montage = {m.at("a").get<std::string>(), m.at("b").get<std::string>(), r.axis};
    s.mean_r_eog = m.at("mean_r_eog").get<double>();
    s.mean_r_cam = m.at("mean_r_cam").get<double>();
    s.sd_r_eog = m.at("sd_r_eog").get<double>();
    s.sd_r_cam = m.at("sd_r_cam").get<double>();
    s.polarity_eog = m.at("polarity_eog").get<int>();
    s.polarity_cam = m.at("polarity_cam").get<int>();
    for (const auto& v : m.at("subject_r_eog")) s.subject_r_eog.push_back(optional_from_json(v));
    for (const auto& v : m.at("subject_r_cam")) s.subject_r_cam.push_back(optional_from_json(v));
    s.excluded_trials = m.at("excluded_trials").get<int>();
    r.montages.push_back(std::move(s));
  }
  if (!value.at("significance_eog").is_null()) r.eog = test_from_json(value.at("significance_eog"));
  if (!value.at("significance_cam").is_null()) r.cam = test_from_json(value.at("significance_cam"));
  return r;
}

json to_json(const saccade::MaeTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"direction", row.direction ? json(to_string(*row.direction)) : json(nullptr)},
                    {"target_angle_deg", optional_to_json(row.target_angle_deg)},
                    {"count", row.count},
                    {"mae_deg", row.mae},
                    {"sd_deg", row.sd},
                    {"label", saccade::format_mae(row.mae, row.sd)}});
  }
  return {{"axis", to_string(table.axis)},
          {"recommended", table.recommended},
          {"note", table.recommended ? "" : "not recommended: ear montages carry little vertical signal"},
          {"rows", rows},
          {"predictions", table.predictions}};
}

saccade::MaeTable mae_table_from_json(const json& value) {
  saccade::MaeTable t;
  t.axis = parse_axis(value.at("axis").get<std::string>());
  t.recommended = value.at("recommended").get<bool>();
  for (const auto& row : value.at("rows")) {
    saccade::MaeRow r;
    if (!row.at("direction").is_null()) r.direction = parse_direction(row.at("direction").get<std::string>());
    r.target_angle_deg = optional_from_json(row.at("target_angle_deg"));
    r.count = row.at("count").get<int>();
    r.mae = row.at("mae_deg").get<double>();
    r.sd = row.at("sd_deg").get<double>();
    t.rows.push_back(r);
  }
  t.predictions = value.at("predictions").get<std::vector<double>>();
  return t;
}

json to_json(const saccade::BlandAltmanSummary& s) {
  return {{"mean_difference_deg", s.mean_difference},
          {"sd_difference_deg", s.sd_difference},
          {"loa_low_deg", s.loa_low},
          {"loa_high_deg", s.loa_high},
          {"means", s.means},
          {"differences", s.differences}};
}

saccade::BlandAltmanSummary bland_altman_from_json(const json& v) {
  saccade::BlandAltmanSummary s;
  s.mean_difference = v.at("mean_difference_deg").get<double>();
  s.sd_difference = v.at("sd_difference_deg").get<double>();
  s.loa_low = v.at("loa_low_deg").get<double>();
  s.loa_high = v.at("loa_high_deg").get<double>();
  s.means = v.at("means").get<std::vector<double>>();
  s.differences = v.at("differences").get<std::vector<double>>();
  return s;
}

json to_json(const stats::CorrelationResult& result) {
  return {{"r", result.r}, {"lag", result.lag}, {"p_value", optional_to_json(result.p_value)}};
}

void write_montage_plot(const montage::CorrelationReport& report, const fs::path& path) {
  io::Table t;
  t.header = {"montage", "mean_r_eog", "mean_r_cam", "sd_r_eog", "sd_r_cam"};
  for (const auto& m : report.montages) {
    t.rows.push_back({m.montage.name(), io::format_double(m.mean_r_eog), io::format_double(m.mean_r_cam),
                      io::format_double(m.sd_r_eog), io::format_double(m.sd_r_cam)});
  }
  io::write_table(path, t);
}

void write_pursuit_annotations(std::span<const synth::PursuitAnnotation> trials, const fs::path& path) {
  io::Table t;
  t.header = {"id", "start_idx", "end_idx", "axis", "amplitude_deg", "frequency_hz"};
  for (const auto& a : trials) {
    t.rows.push_back({std::to_string(a.id), std::to_string(a.start), std::to_string(a.end),
                      std::string(to_string(a.axis)), io::format_double(a.amplitude_deg),
                      io::format_double(a.frequency_hz)});
  }
  io::write_table(path, t);
}

std::vector<synth::PursuitAnnotation> load_pursuit_annotations(const fs::path& path) {
  const auto t = io::read_table(path);
  expect_header(t, {"id", "start_idx", "end_idx", "axis", "amplitude_deg", "frequency_hz"}, path);
  std::vector<synth::PursuitAnnotation> out;
  for (const auto& row : t.rows) {
    synth::PursuitAnnotation a;
    a.id = parse_integer<int>(row[0], path);
    a.start = parse_integer<std::size_t>(row[1], path);
    a.end = parse_integer<std::size_t>(row[2], path);
    a.axis = parse_axis(row[3]);
    a.amplitude_deg = io::parse_double(row[4]);
    a.frequency_hz = io::parse_double(row[5]);
    if (a.start >= a.end) throw io::FormatError(io::FormatIssue::malformed_row, path.string() + ": empty trial");
    out.push_back(a);
  }
  return out;
}

void write_saccade_annotations(std::span<const synth::SaccadeAnnotation> saccades, const fs::path& path) {
  io::Table t;
  t.header = {"id", "onset_idx", "direction", "target_angle_deg", "outward"};
  for (const auto& a : saccades) {
    t.rows.push_back({std::to_string(a.id), std::to_string(a.onset), std::string(to_string(a.direction)),
                      io::format_double(a.target_angle_deg), fmt_flag(a.outward)});
  }
  io::write_table(path, t);
}

std::vector<synth::SaccadeAnnotation> load_saccade_annotations(const fs::path& path) {
  const auto t = io::read_table(path);
  expect_header(t, {"id", "onset_idx", "direction", "target_angle_deg", "outward"}, path);
  std::vector<synth::SaccadeAnnotation> out;
  for (const auto& row : t.rows) {
    synth::SaccadeAnnotation a;
    a.id = parse_integer<int>(row[0], path);
    a.onset = parse_integer<std::size_t>(row[1], path);
    a.direction = parse_direction(row[2]);
    a.target_angle_deg = io::parse_double(row[3]);
    a.outward = parse_flag(row[4], path);
    out.push_back(a);
  }
  return out;
}

void write_events(std::span<const saccade::SaccadeEvent> events, const fs::path& path) {
  io::Table t;
  t.header = {"subject_id", "annotation_id", "direction", "target_angle_deg", "outward",
              "start_idx",  "end_idx",       "valid",     "reason"};
  for (const auto& e : events) {
    t.rows.push_back({e.subject_id, std::to_string(e.annotation_id), std::string(to_string(e.direction)),
                      io::format_double(e.target_angle_deg), fmt_flag(e.outward), std::to_string(e.start_idx),
                      std::to_string(e.end_idx), fmt_flag(e.valid), e.reason});
  }
  io::write_table(path, t);
}

std::vector<saccade::SaccadeEvent> load_events(const fs::path& path) {
  const auto t = io::read_table(path);
  expect_header(t,
                {"subject_id", "annotation_id", "direction", "target_angle_deg", "outward", "start_idx", "end_idx",
                 "valid", "reason"},
                path);
  std::vector<saccade::SaccadeEvent> out;
  for (const auto& row : t.rows) {
    saccade::SaccadeEvent e;
    e.subject_id = row[0];
    e.annotation_id = parse_integer<int>(row[1], path);
    e.direction = parse_direction(row[2]);
    e.target_angle_deg = io::parse_double(row[3]);
    e.outward = parse_flag(row[4], path);
    e.start_idx = parse_integer<std::size_t>(row[5], path);
    e.end_idx = parse_integer<std::size_t>(row[6], path);
    e.valid = parse_flag(row[7], path);
    e.reason = row[8];
    out.push_back(std::move(e));
  }
  return out;
}

void write_deflections(std::span<const SourcedDeflection> rows, const fs::path& path) {
  io::Table t;
  t.header = {"source",           "channel",               "subject_id",   "direction",
              "target_angle_deg", "true_angle_change_deg", "deflection_uv"};
  for (const auto& r : rows) {
    const auto& s = r.sample;
    t.rows.push_back({r.source, r.channel, s.subject_id, std::string(to_string(s.direction)),
                      io::format_double(s.target_angle_deg), io::format_double(s.true_angle_change),
                      io::format_double(s.deflection)});
  }
  io::write_table(path, t);
}

std::vector<SourcedDeflection> load_deflections(const fs::path& path) {
  const auto t = io::read_table(path);
  expect_header(t,
                {"source", "channel", "subject_id", "direction", "target_angle_deg", "true_angle_change_deg",
                 "deflection_uv"},
                path);
  std::vector<SourcedDeflection> out;
  for (const auto& row : t.rows) {
    SourcedDeflection r;
    r.source = row[0];
    r.channel = row[1];
    r.sample.subject_id = row[2];
    r.sample.direction = parse_direction(row[3]);
    r.sample.target_angle_deg = io::parse_double(row[4]);
    r.sample.true_angle_change = io::parse_double(row[5]);
    r.sample.deflection = io::parse_double(row[6]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_waveforms(std::span<const SourcedWaveform> waves, const fs::path& path) {
  io::Table t;
  t.header = {"source", "channel", "direction", "target_angle_deg", "count", "index", "mean_uv", "sd_uv"};
  for (const auto& w : waves) {
    for (std::size_t k = 0; k < w.cell.mean.size(); ++k) {
      t.rows.push_back({w.source, w.channel, std::string(to_string(w.cell.direction)),
                        io::format_double(w.cell.target_angle_deg), std::to_string(w.cell.count), std::to_string(k),
                        io::format_double(w.cell.mean[k]), io::format_double(w.cell.sd[k])});
    }
  }
  io::write_table(path, t);
}

}  // namespace eargaze::report
