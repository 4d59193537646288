#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "eargaze/io.hpp"
#include "eargaze/types.hpp"

using namespace eargaze;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(EARGAZE_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ElectrodeLayout small_layout() {
  return ElectrodeLayout({{"L1", {-70, 10, 0}, EarSide::left},
                          {"L2", {-70, -10, 0}, EarSide::left},
                          {"R1", {70, 10, 0}, EarSide::right},
                          {"R2", {70, -10, 0}, EarSide::right}});
}

void write_meta(const fs::path& csv, double rate = 125.0) {
  io::write_json(io::metadata_path(csv), {{"subject_id", "S01"},
                                          {"sample_rate_hz", rate},
                                          {"reference_label", "REF"},
                                          {"task_tag", "saccade"}});
}

io::FormatIssue load_issue(const fs::path& csv, const ElectrodeLayout& layout) {
  try {
    io::load_recording(csv, layout);
  } catch (const io::FormatError& e) {
    return e.issue();
  }
  FAIL("expected a FormatError");
  return io::FormatIssue::missing_file;
}

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace

TEST_CASE("layout rejects duplicates, coincident points and a one-electrode ear") {
  CHECK_NOTHROW(small_layout());
  CHECK_THROWS_AS(ElectrodeLayout({{"L1", {-70, 0, 0}, EarSide::left},
                                   {"L1", {-70, 5, 0}, EarSide::left},
                                   {"R1", {70, 0, 0}, EarSide::right},
                                   {"R2", {70, 5, 0}, EarSide::right}}),
                  ValidationError);
  CHECK_THROWS_AS(ElectrodeLayout({{"L1", {-70, 0, 0}, EarSide::left},
                                   {"L2", {-70, 0, 0}, EarSide::left},
                                   {"R1", {70, 0, 0}, EarSide::right},
                                   {"R2", {70, 5, 0}, EarSide::right}}),
                  ValidationError);
  CHECK_THROWS_AS(ElectrodeLayout({{"L1", {-70, 0, 0}, EarSide::left},
                                   {"R1", {70, 0, 0}, EarSide::right},
                                   {"R2", {70, 5, 0}, EarSide::right}}),
                  ValidationError);
}

TEST_CASE("pixels to visual angle") {
  const auto geom = ScreenGeometry::lab_default();
  auto a = io::pixels_to_visual_angle(0, 0, geom);
  CHECK(a.horizontal_deg == 0.0);
  CHECK(a.vertical_deg == 0.0);

  a = io::pixels_to_visual_angle(30, 0, geom);
  CHECK(a.horizontal_deg == doctest::Approx(deg(std::atan(7.8 / 500.0))).epsilon(1e-12));
  CHECK(a.horizontal_deg == doctest::Approx(0.894).epsilon(1e-3));
  CHECK(a.vertical_deg == 0.0);

  const double px15 = 500.0 * std::tan(15.0 * std::numbers::pi / 180.0) / 0.26;
  CHECK(px15 == doctest::Approx(515.3).epsilon(1e-3));
  double x = 0, y = 0;
  io::visual_angle_to_pixels({15.0, -4.0}, geom, x, y);
  CHECK(x == doctest::Approx(px15).epsilon(1e-12));
  const auto back = io::pixels_to_visual_angle(x, y, geom);
  CHECK(std::abs(back.horizontal_deg - 15.0) < 1e-9);
  CHECK(std::abs(back.vertical_deg + 4.0) < 1e-9);

  // odd and monotone on each axis
  double prev = -1e9;
  for (double p = -900; p <= 900; p += 37.5) {
    const auto f = io::pixels_to_visual_angle(p, p, geom);
    const auto g = io::pixels_to_visual_angle(-p, -p, geom);
    CHECK(f.horizontal_deg == doctest::Approx(-g.horizontal_deg));
    CHECK(f.vertical_deg == doctest::Approx(-g.vertical_deg));
    CHECK(f.horizontal_deg > prev);
    prev = f.horizontal_deg;
  }
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, 123456.789, -2.5e17, 0.1 + 0.2}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
}

TEST_CASE("load_recording: well formed file") {
  const auto dir = tmp_dir("rec_ok");
  const auto csv = dir / "rec.csv";
  write_text(csv, "timestamp_s,L1,R1\n0,1.5,2\n0.008,2.5,3\n0.016,3.5,4\n0.024,4.5,5\n");
  write_meta(csv);
  const auto rec = io::load_recording(csv, small_layout());
  CHECK(rec.labels.size() == 2);
  CHECK(rec.length() == 4);
  CHECK(rec.sample_rate == 125.0);
  CHECK(rec.subject_id == "S01");
  CHECK(rec.channel("R1")[3] == 5.0);
}

TEST_CASE("load_recording: each defect has its own issue") {
  const auto dir = tmp_dir("rec_bad");
  const auto layout = small_layout();

  const auto unknown = dir / "unknown.csv";
  write_text(unknown, "timestamp_s,L1,L9\n0,1,2\n0.008,1,2\n");
  write_meta(unknown);
  CHECK(load_issue(unknown, layout) == io::FormatIssue::unknown_label);

  const auto ragged = dir / "ragged.csv";
  write_text(ragged, "timestamp_s,L1,R1\n0,1,2\n0.008,1,\n");
  write_meta(ragged);
  CHECK(load_issue(ragged, layout) == io::FormatIssue::inconsistent_length);

  const auto short_row = dir / "short_row.csv";
  write_text(short_row, "timestamp_s,L1,R1\n0,1,2\n0.008,1\n");
  write_meta(short_row);
  CHECK(load_issue(short_row, layout) == io::FormatIssue::malformed_row);

  const auto malformed = dir / "malformed.csv";
  write_text(malformed, "timestamp_s,L1,R1\n0,1,2\n0.008,abc,2\n");
  write_meta(malformed);
  CHECK(load_issue(malformed, layout) == io::FormatIssue::malformed_row);

  const auto rate = dir / "rate.csv";
  write_text(rate, "timestamp_s,L1,R1\n0,1,2\n0.008,1,2\n");
  write_meta(rate, 0.0);
  CHECK(load_issue(rate, layout) == io::FormatIssue::bad_sample_rate);

  CHECK(load_issue(dir / "absent.csv", layout) == io::FormatIssue::missing_file);
}

TEST_CASE("recording write/read round-trip") {
  const auto dir = tmp_dir("rec_rt");
  Recording rec;
  rec.subject_id = "S07";
  rec.reference_label = "REF";
  rec.task_tag = "pursuit_horizontal";
  rec.sample_rate = 125.0;
  rec.labels = {"L1", "R2", "hEOG"};
  rec.channels = {{0.1, -0.2, 1.0 / 3.0}, {1e-9, 2e5, -7.25}, {3.0, 4.0, 5.0}};
  io::write_recording(rec, dir / "r.csv");
  CHECK(io::load_recording(dir / "r.csv", small_layout()) == rec);
}

TEST_CASE("gaze log: gaps, monotonicity and round-trip") {
  const auto dir = tmp_dir("gaze");
  const auto geom = ScreenGeometry::lab_default();

  write_text(dir / "ok.csv", "timestamp_s,gaze_x_px,gaze_y_px\n0,960,540\n0.0166,990,540\n0.0333,960,510\n");
  auto log = io::load_gaze_log(dir / "ok.csv", geom);
  REQUIRE(log.size() == 3);
  CHECK(log.horizontal[0].value() == doctest::Approx(0.0));
  CHECK(log.horizontal[1].value() == doctest::Approx(deg(std::atan(7.8 / 500.0))));
  CHECK(log.vertical[2].value() == doctest::Approx(deg(std::atan(7.8 / 500.0))));

  write_text(dir / "gap.csv", "timestamp_s,gaze_x_px,gaze_y_px\n0,960,540\n0.0166,,\n0.0333,960,510\n");
  log = io::load_gaze_log(dir / "gap.csv", geom);
  CHECK(log.size() == 3);
  CHECK_FALSE(log.horizontal[1].has_value());
  CHECK_FALSE(log.vertical[1].has_value());

  write_text(dir / "mono.csv", "timestamp_s,gaze_x_px,gaze_y_px\n0.0,960,540\n0.0,960,540\n");
  try {
    io::load_gaze_log(dir / "mono.csv", geom);
    FAIL("expected non_monotonic");
  } catch (const io::FormatError& e) {
    CHECK(e.issue() == io::FormatIssue::non_monotonic);
  }

  GazeLog g;
  g.timestamps = {0.0, 1.0 / 60.0, 2.0 / 60.0, 0.05 + 1e-4};
  g.horizontal = {1.25, std::nullopt, -3.5, 14.9};
  g.vertical = {0.0, std::nullopt, 2.0, -0.7};
  io::write_gaze_log(g, dir / "rt.csv", geom);
  const auto back = io::load_gaze_log(dir / "rt.csv", geom);
  REQUIRE(back.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(back.timestamps[i] == g.timestamps[i]);
    CHECK(back.horizontal[i].has_value() == g.horizontal[i].has_value());
    if (g.horizontal[i]) {
      CHECK(std::abs(*back.horizontal[i] - *g.horizontal[i]) < 1e-9);
      CHECK(std::abs(*back.vertical[i] - *g.vertical[i]) < 1e-9);
    }
  }
}

TEST_CASE("layout and screen round-trip") {
  const auto dir = tmp_dir("layout");
  const auto layout = small_layout();
  io::write_layout(layout, dir / "layout.json");
  CHECK(io::load_layout(dir / "layout.json") == layout);

  ScreenGeometry geom{1280, 720, 0.3, 600};
  io::write_screen(geom, dir / "screen.json");
  CHECK(io::load_screen(dir / "screen.json") == geom);

  write_text(dir / "bad_screen.json", R"({"width_px":1920,"height_px":1080,"pixel_pitch_mm":-1,"viewing_distance_mm":500})");
  CHECK_THROWS_AS(io::load_screen(dir / "bad_screen.json"), Error);
}

TEST_CASE("unwritable path is an I/O error") {
  CHECK_THROWS_AS(io::write_json("/proc/definitely/not/here.json", nlohmann::json::object()), Error);
}
