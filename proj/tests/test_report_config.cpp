#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "eargaze/config.hpp"
#include "eargaze/error.hpp"
#include "eargaze/io.hpp"
#include "eargaze/pipeline.hpp"
#include "eargaze/report.hpp"

using namespace eargaze;
namespace fs = std::filesystem;

namespace {

// Gaze is stored in pixels, so degrees come back to rounding only.
void check_gaze_close(const GazeLog& a, const GazeLog& b) {
  CHECK(a.timestamps == b.timestamps);
  REQUIRE(a.size() == b.size());
  for (auto axis : {Axis::horizontal, Axis::vertical}) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& x = a.component(axis)[i];
      const auto& y = b.component(axis)[i];
      REQUIRE(x.has_value() == y.has_value());
      if (x) CHECK(std::abs(*x - *y) <= 1e-9);
    }
  }
}

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(EARGAZE_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

template <class T, class Read>
T through_text(const nlohmann::json& j, Read read) {
  return read(nlohmann::json::parse(j.dump()));
}

montage::CorrelationReport sample_report() {
  montage::CorrelationReport r;
  r.axis = Axis::horizontal;
  r.aggregation = montage::Aggregation::within_subject;
  r.subjects = {"S01", "S02", "S03"};
  r.trials = 54;
  r.excluded_trials = 1;
  for (const char* name : {"L8-R8", "L7-R7"}) {
    montage::MontageScore s;
    s.montage = montage::parse_montage(name, Axis::horizontal);
    s.mean_r_eog = 0.1 + 0.2;  // not representable in short decimal form
    s.mean_r_cam = 0.9876543210987654;
    s.sd_r_eog = 1e-300;
    s.sd_r_cam = 0.0;
    s.polarity_eog = -1;
    s.subject_r_eog = {0.97, std::nullopt, 0.99};
    s.subject_r_cam = {0.95, 0.96, std::nullopt};
    s.excluded_trials = 1;
    r.montages.push_back(s);
  }
  montage::SignificanceTest t;
  t.friedman_statistic = 12.25;
  t.friedman_p = 4.6e-4;
  t.subjects_used = 3;
  t.posthoc.computed = true;
  t.posthoc.p_matrix = {{std::nullopt, 0.03125}, {0.03125, std::nullopt}};
  r.eog = t;
  t.posthoc = {};
  t.posthoc.reason = "friedman p >= alpha";
  r.cam = t;
  return r;
}

}  // namespace

TEST_CASE("correlation report JSON round-trips") {
  const auto r = sample_report();
  CHECK(through_text<montage::CorrelationReport>(report::to_json(r), report::correlation_report_from_json) == r);

  montage::CorrelationReport empty;
  empty.axis = Axis::vertical;
  empty.aggregation = montage::Aggregation::pooled;
  const auto back = through_text<montage::CorrelationReport>(report::to_json(empty), report::correlation_report_from_json);
  CHECK(back == empty);
  CHECK(back.montages.empty());
  CHECK_FALSE(back.eog.has_value());

  for (auto a : {montage::Aggregation::within_subject, montage::Aggregation::pooled}) {
    CHECK(report::parse_aggregation(report::to_string(a)) == a);
  }
  CHECK_THROWS_AS(report::parse_aggregation("median"), ValidationError);
}

TEST_CASE("MAE table and Bland-Altman JSON round-trip") {
  saccade::MaeTable t;
  t.axis = Axis::vertical;
  t.recommended = false;
  t.rows = {{Direction::up, 2.5, 4, 1.0 / 3.0, 0.25}, {Direction::up, std::nullopt, 4, 1.5, 0.5}, {}};
  t.rows.back().count = 4;
  t.rows.back().mae = 2.0 / 7.0;
  t.predictions = {1.25, -3.0, 7.0 / 3.0, 0.0};
  CHECK(through_text<saccade::MaeTable>(report::to_json(t), report::mae_table_from_json) == t);

  saccade::BlandAltmanSummary b;
  b.mean_difference = -0.1;
  b.sd_difference = 0.7;
  b.loa_low = -0.1 - 1.96 * 0.7;
  b.loa_high = -0.1 + 1.96 * 0.7;
  b.means = {1.0, 2.0 / 3.0};
  b.differences = {-0.1, 1e-17};
  CHECK(through_text<saccade::BlandAltmanSummary>(report::to_json(b), report::bland_altman_from_json) == b);
}

TEST_CASE("CSV products round-trip") {
  const auto dir = tmp_dir("csv");

  const std::vector<synth::PursuitAnnotation> trials{{0, 250, 1000, Axis::horizontal, 2.5, 0.33},
                                                     {1, 1125, 1875, Axis::vertical, 15.0, 1.0}};
  report::write_pursuit_annotations(trials, dir / "trials.csv");
  CHECK(report::load_pursuit_annotations(dir / "trials.csv") == trials);

  const std::vector<synth::SaccadeAnnotation> sacc{{0, 250, Direction::left, 2.5, true},
                                                   {1, 500, Direction::right, 2.5, false},
                                                   {2, 750, Direction::down, 12.5, true}};
  report::write_saccade_annotations(sacc, dir / "saccades.csv");
  CHECK(report::load_saccade_annotations(dir / "saccades.csv") == sacc);

  std::vector<saccade::SaccadeEvent> events(2);
  events[0] = {"S01", 0, Direction::left, 2.5, true, 251, 258, true, ""};
  events[1] = {"S02", 3, Direction::up, 7.5, true, 1000, 1001, false, "no clear start or end"};
  report::write_events(events, dir / "events.csv");
  CHECK(report::load_events(dir / "events.csv") == events);

  std::vector<report::SourcedDeflection> defl;
  defl.push_back({"earEOG", "L8-R8", {"S01", Direction::left, 2.5, -2.5, 0.1 + 0.2}});
  defl.push_back({"gold", "hEOG", {"S01", Direction::right, 15.0, 14.999999999999998, -40.16}});
  report::write_deflections(defl, dir / "deflections.csv");
  CHECK(report::load_deflections(dir / "deflections.csv") == defl);

  const std::vector<saccade::EventOverride> ov{{"S01", 0, 250, 260, true}, {"S03", 17, 10, 11, false}};
  saccade::write_overrides(ov, dir / "overrides.csv");
  CHECK(saccade::load_overrides(dir / "overrides.csv") == ov);

  std::ofstream(dir / "bad.csv") << "id,onset\n0,250\n";
  CHECK_THROWS_AS(report::load_saccade_annotations(dir / "bad.csv"), DataError);
}

TEST_CASE("montage plot data lists every montage in rank order") {
  const auto dir = tmp_dir("plot");
  const auto r = sample_report();
  report::write_montage_plot(r, dir / "plot.csv");
  const auto t = io::read_table(dir / "plot.csv");
  REQUIRE(t.rows.size() == r.montages.size());
  CHECK(t.header.front() == "montage");
  CHECK(t.rows[0][0] == "L8-R8");
  CHECK(std::stod(t.rows[0][1]) == r.montages[0].mean_r_eog);
}

TEST_CASE("synthetic dataset survives write and load") {
  config::PipelineConfig c;
  c.synthetic.subjects = 2;
  c.protocol.pursuit.amplitudes_deg = {5.0};
  c.protocol.pursuit.frequencies_hz = {0.5};
  c.protocol.saccade.angles_deg = {5.0, 10.0};
  const auto ds = pipeline::synthesize(c);
  const auto dir = tmp_dir("dataset");
  const auto written = pipeline::write_dataset(ds, dir);
  CHECK_FALSE(written.empty());
  const auto back = pipeline::load_dataset(dir, c);
  CHECK(back.layout == ds.layout);
  CHECK(back.screen == ds.screen);
  REQUIRE(back.subjects.size() == ds.subjects.size());
  for (std::size_t s = 0; s < ds.subjects.size(); ++s) {
    const auto& a = ds.subjects[s];
    const auto& b = back.subjects[s];
    CHECK(a.id == b.id);
    CHECK(a.pursuit_horizontal.recording == b.pursuit_horizontal.recording);
    CHECK(a.pursuit_horizontal.trials == b.pursuit_horizontal.trials);
    check_gaze_close(a.pursuit_vertical.gaze, b.pursuit_vertical.gaze);
    CHECK(a.saccade.recording == b.saccade.recording);
    check_gaze_close(a.saccade.gaze, b.saccade.gaze);
    CHECK(a.saccade.saccades == b.saccade.saccades);
  }
}

TEST_CASE("config JSON round-trip and file loading") {
  config::PipelineConfig c;
  c.seed = 123456789012345ULL;
  c.execution = kernels::Execution::serial;
  c.synthetic.subjects = 5;
  c.preprocess.filter.low_cut_hz = 0.2;
  c.montage.rank.aggregation = montage::Aggregation::pooled;
  c.saccade.montage_horizontal = "L7-R7";
  c.saccade.model_scope = saccade::ModelScope::per_direction;
  const auto j = config::to_json(c);
  CHECK(config::to_json(config::from_json(nlohmann::json::parse(j.dump()))) == j);

  // missing keys take defaults
  CHECK(config::to_json(config::from_json(nlohmann::json::object())) == config::to_json(config::PipelineConfig{}));

  const auto file = fs::path(EARGAZE_TEST_TMP) / "cfg.json";
  fs::create_directories(file.parent_path());
  io::write_json(file, j);
  CHECK(config::to_json(config::load(file, {})) == j);

  auto bad = j;
  bad["montage"]["windowz"] = 3;
  CHECK_THROWS_AS(config::from_json(bad), ValidationError);
  CHECK_THROWS_AS(config::load(fs::path(EARGAZE_TEST_TMP) / "nope.json", {}), ValidationError);
}

TEST_CASE("overrides") {
  const auto c = config::load({}, {"seed=11", "preprocess.order=4", "montage.aggregation=pooled",
                                   "paths.output_dir=123", "protocol.saccade.angles_deg=[5,10]"});
  CHECK(c.seed == 11);
  CHECK(c.preprocess.filter.order == 4);
  CHECK(c.montage.rank.aggregation == montage::Aggregation::pooled);
  CHECK(c.paths.output_dir == "123");  // string keys keep the raw text
  CHECK(c.protocol.saccade.angles_deg == std::vector<double>{5.0, 10.0});

  CHECK_THROWS_AS(config::load({}, {"montage.windowz=3"}), ValidationError);
  CHECK_THROWS_AS(config::load({}, {"seed"}), ValidationError);
  CHECK_THROWS_AS(config::load({}, {"=4"}), ValidationError);
  CHECK_THROWS_AS(config::load({}, {"seed.x=1"}), ValidationError);
  CHECK_THROWS_AS(config::load({}, {"montage.aggregation=median"}), ValidationError);
}

TEST_CASE("validation") {
  auto reject = [](const std::string& o) { CHECK_THROWS_AS(config::load({}, {o}), ValidationError); };
  reject("preprocess.low_cut_hz=15");
  reject("preprocess.low_cut_hz=20");
  reject("preprocess.high_cut_hz=62.5");
  reject("preprocess.order=0");
  reject("synthetic.subjects=1");
  reject("montage.alpha=1");
  reject("montage.max_lag_eog=-1");
  reject("montage.mean_window=0");
  reject("saccade.montage_horizontal=L8");
  reject("saccade.context_s=2");
  reject("protocol.saccade.directions=[\"left\",\"left\"]");
  CHECK_NOTHROW(config::PipelineConfig{}.validate());

  config::PipelineConfig c;
  c.paths.data_dir = "/does/not/exist";
  CHECK_THROWS_AS(c.check_paths(), ValidationError);
}

TEST_CASE("FNV-1a and config hash") {
  CHECK(config::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(config::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(config::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(config::hex64(0xabcULL) == "0000000000000abc");

  config::PipelineConfig a, b;
  CHECK(config::config_hash(a) == config::config_hash(b));
  CHECK(config::config_hash(a).size() == 16);
  b.seed = 8;
  CHECK(config::config_hash(a) != config::config_hash(b));
}
