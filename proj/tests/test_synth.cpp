#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "eargaze/error.hpp"
#include "eargaze/synth.hpp"

using namespace eargaze;

namespace {

double pearson_ref(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> diff(const Recording& rec, std::string_view a, std::string_view b) {
  const auto& ca = rec.channel(a);
  const auto& cb = rec.channel(b);
  std::vector<double> out(ca.size());
  for (std::size_t i = 0; i < ca.size(); ++i) out[i] = ca[i] - cb[i];
  return out;
}

// Two-eye potential difference between electrodes evaluated straight from the formula.
double model_diff(const synth::HeadModel& m, double h, double v, const Point3& a, const Point3& b) {
  double out = 0;
  for (const auto& eye : m.eye_centers) {
    for (int s : {1, -1}) {
      const Point3 r = (s == 1 ? a : b) - eye;
      const double d = norm(r);
      out += s * m.dipole_moment * dot(synth::gaze_direction(h, v), r) / (d * d * d);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("pursuit trajectory") {
  CHECK(synth::pursuit_angle(15, 1, 0, 0.0) == doctest::Approx(0.0));
  CHECK(synth::pursuit_angle(15, 1, 0, 0.25) == doctest::Approx(15.0).epsilon(1e-12));

  const auto t = synth::pursuit_trajectory_at_phase(15, 1, 6, Axis::horizontal, 0.0);
  CHECK(t.size() == 750);
  CHECK(t.horizontal[0] == 0.0);
  CHECK(std::all_of(t.vertical.begin(), t.vertical.end(), [](double v) { return v == 0.0; }));
  // On the sample grid the peak is within one sample of the analytic maximum.
  const double peak = *std::max_element(t.horizontal.begin(), t.horizontal.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
  CHECK(std::abs(peak) <= 15.0 + 1e-9);
  CHECK(std::abs(peak) >= 15.0 * std::cos(std::numbers::pi / 125.0) - 1e-9);

  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    const auto p = synth::pursuit_trajectory(10, 0.5, 6, Axis::vertical, seed);
    for (std::size_t i = 0; i + 250 < p.size(); ++i) CHECK(p.vertical[i] == doctest::Approx(p.vertical[i + 250]));
    CHECK(std::all_of(p.vertical.begin(), p.vertical.end(), [](double v) { return std::abs(v) <= 10.0 + 1e-9; }));
  }
  CHECK(synth::pursuit_trajectory(10, 0.5, 6, Axis::vertical, 5).vertical ==
        synth::pursuit_trajectory(10, 0.5, 6, Axis::vertical, 5).vertical);

  CHECK_THROWS_AS(synth::pursuit_trajectory(0, 1, 6, Axis::horizontal, 1), ValidationError);
  CHECK_THROWS_AS(synth::pursuit_trajectory(90, 1, 6, Axis::horizontal, 1), ValidationError);
  CHECK_THROWS_AS(synth::pursuit_trajectory(10, 0, 6, Axis::horizontal, 1), ValidationError);
  CHECK_THROWS_AS(synth::pursuit_trajectory(10, 1, 0, Axis::horizontal, 1), ValidationError);
}

TEST_CASE("pursuit session annotates each trial") {
  synth::PursuitSessionParams p;
  const auto s = synth::pursuit_session(p, 3);
  REQUIRE(s.trials.size() == 18);
  for (const auto& tr : s.trials) {
    CHECK(tr.end - tr.start == 750);
    CHECK(tr.end <= s.size());
  }
}

TEST_CASE("saccade protocol") {
  const auto def = synth::saccade_protocol({});
  const auto outward = std::count_if(def.saccades.begin(), def.saccades.end(), [](auto& a) { return a.outward; });
  CHECK(outward == 24);
  std::set<std::pair<int, double>> cells;
  for (const auto& a : def.saccades) {
    if (a.outward) cells.insert({static_cast<int>(a.direction), a.target_angle_deg});
  }
  CHECK(cells.size() == 24);

  synth::SaccadeProtocolParams three;
  three.cycles = 3;
  const auto thrice = synth::saccade_protocol(three).saccades;
  CHECK(std::count_if(thrice.begin(), thrice.end(), [](auto& a) { return a.outward; }) == 72);

  synth::SaccadeProtocolParams one;
  one.angles_deg = {2.5};
  one.directions = {Direction::left};
  const auto t = synth::saccade_protocol(one);
  for (double v : t.horizontal) CHECK((v == 0.0 || v == -2.5));
  CHECK(std::all_of(t.vertical.begin(), t.vertical.end(), [](double v) { return v == 0.0; }));
  // a fixation spans fs * 2 s samples
  REQUIRE(t.saccades.size() == 2);
  CHECK(t.saccades[1].onset - t.saccades[0].onset == 250);
  CHECK(t.horizontal[t.saccades[0].onset] == -2.5);
  CHECK(t.horizontal[t.saccades[0].onset - 1] == 0.0);

  synth::SaccadeProtocolParams bad;
  bad.angles_deg = {0.0};
  CHECK_THROWS_AS(synth::saccade_protocol(bad), ValidationError);
  bad.angles_deg = {95.0};
  CHECK_THROWS_AS(synth::saccade_protocol(bad), ValidationError);
  bad = {};
  bad.fixation_s = 0;
  CHECK_THROWS_AS(synth::saccade_protocol(bad), ValidationError);
}

TEST_CASE("dipole potential") {
  const Point3 eye{0, 0, 0};
  // gaze straight ahead is +y; an electrode on the x axis is perpendicular
  CHECK(synth::dipole_potential(0, 0, eye, 1000, {50, 0, 0}) == doctest::Approx(0.0));
  const double near = synth::dipole_potential(20, 10, eye, 1000, {10, 30, 5});
  const double far = synth::dipole_potential(20, 10, eye, 1000, {20, 60, 10});
  CHECK(far == doctest::Approx(near / 4).epsilon(1e-12));

  const double k = 100.0 * 52.2 * 52.2;
  CHECK(synth::dipole_potential(0, 0, eye, k, {0, 52.2, 0}) == doctest::Approx(100.0));
  CHECK(synth::dipole_potential(0, 0, eye, k, {0, -52.2, 0}) == doctest::Approx(-100.0));
  CHECK_THROWS_AS(synth::dipole_potential(0, 0, eye, k, eye), ValidationError);

  // yaw then pitch
  const auto g = synth::gaze_direction(30, 20);
  const double c = std::cos(20 * std::numbers::pi / 180);
  CHECK(g.x == doctest::Approx(std::sin(30 * std::numbers::pi / 180) * c));
  CHECK(g.y == doctest::Approx(std::cos(30 * std::numbers::pi / 180) * c));
  CHECK(g.z == doctest::Approx(std::sin(20 * std::numbers::pi / 180)));
}

TEST_CASE("default head model calibration") {
  const auto m = synth::default_head_model();
  const auto& l8 = m.layout.at("L8").position;
  const auto& r8 = m.layout.at("R8").position;
  const double step = model_diff(m, 15, 0, l8, r8) - model_diff(m, 0, 0, l8, r8);
  CHECK(std::abs(step) == doctest::Approx(40.16).epsilon(1e-9));
  CHECK(std::abs(step) >= 0.75 * 40.16);
  CHECK(std::abs(step) <= 1.25 * 40.16);
  CHECK(m.layout.electrodes().size() == 17);
  CHECK(l8.z == 0.0);
  CHECK(m.eye_centers[0].z == 0.0);
}

TEST_CASE("noiseless simulation properties") {
  const auto model = synth::default_head_model();

  SUBCASE("straight ahead: mirror pairs cancel") {
    synth::SaccadeProtocolParams p;
    p.directions = {};
    p.angles_deg = {};
    auto t = synth::pursuit_trajectory_at_phase(10, 1, 2, Axis::horizontal, 0);
    std::fill(t.horizontal.begin(), t.horizontal.end(), 0.0);
    const auto s = synth::simulate_recording(model, t, synth::NoiseConfig::none());
    for (int n = 1; n <= 8; ++n) {
      const auto d = diff(s.recording, "L" + std::to_string(n), "R" + std::to_string(n));
      for (double v : d) CHECK(std::abs(v) < 1e-9);
    }
  }

  SUBCASE("horizontal pursuit tracks gaze") {
    const auto t = synth::pursuit_trajectory_at_phase(15, 0.5, 6, Axis::horizontal, 0.3);
    const auto s = synth::simulate_recording(model, t, synth::NoiseConfig::none());
    const auto d = diff(s.recording, "L8", "R8");
    for (std::size_t i = 0; i < d.size(); i += 97) {
      CHECK(d[i] == doctest::Approx(model_diff(model, t.horizontal[i], 0, model.layout.at("L8").position,
                                               model.layout.at("R8").position)));
    }
    CHECK(std::abs(pearson_ref(d, t.horizontal)) >= 0.999);
    CHECK(std::abs(pearson_ref(s.recording.channel("hEOG"), t.horizontal)) >= 0.999);
  }

  SUBCASE("vertical gaze leaves eye-level mirror pairs at zero") {
    const auto t = synth::pursuit_trajectory_at_phase(15, 0.5, 4, Axis::vertical, 0.0);
    const auto s = synth::simulate_recording(model, t, synth::NoiseConfig::none());
    for (double v : diff(s.recording, "L8", "R8")) CHECK(std::abs(v) < 1e-9);
    for (double v : diff(s.recording, "L3", "R3")) CHECK(std::abs(v) < 1e-9);
  }

  SUBCASE("linear in the moment and independent of the reference") {
    const auto t = synth::pursuit_trajectory_at_phase(12.5, 1, 3, Axis::horizontal, 1.0);
    auto scaled = model;
    scaled.dipole_moment *= 3.0;
    const auto a = synth::simulate_recording(model, t, synth::NoiseConfig::none());
    const auto b = synth::simulate_recording(scaled, t, synth::NoiseConfig::none());
    const auto da = diff(a.recording, "L2", "R5");
    const auto db = diff(b.recording, "L2", "R5");
    for (std::size_t i = 0; i < da.size(); ++i) CHECK(db[i] == doctest::Approx(3.0 * da[i]));

    auto moved = model;
    moved.reference_label = "L1";
    const auto c = synth::simulate_recording(moved, t, synth::NoiseConfig::none());
    const auto dc = diff(c.recording, "L2", "R5");
    for (std::size_t i = 0; i < da.size(); ++i) CHECK(dc[i] == doctest::Approx(da[i]).epsilon(1e-9));
  }
}

TEST_CASE("noisy simulation is deterministic per seed") {
  const auto model = synth::default_head_model();
  const auto t = synth::saccade_protocol({});
  synth::NoiseConfig noise;
  noise.seed = 42;
  synth::SimulationOptions opt;
  opt.gaze_missing_fraction = 0.05;
  opt.gaze_jitter_s = 0.002;
  opt.gaze_delay_s = 0.02;
  const auto a = synth::simulate_recording(model, t, noise, opt);
  const auto b = synth::simulate_recording(model, t, noise, opt);
  CHECK(a.recording == b.recording);
  CHECK(a.gaze_log == b.gaze_log);
  noise.seed = 43;
  CHECK_FALSE(synth::simulate_recording(model, t, noise, opt).recording == a.recording);

  opt.execution = kernels::Execution::serial;
  noise.seed = 42;
  // the serial reference sums the dipole formula directly, so agreement is to rounding
  const auto serial = synth::simulate_recording(model, t, noise, opt).recording;
  REQUIRE(serial.labels == a.recording.labels);
  double worst = 0;
  for (std::size_t c = 0; c < serial.channels.size(); ++c) {
    for (std::size_t i = 0; i < serial.length(); ++i) {
      worst = std::max(worst, std::abs(serial.channels[c][i] - a.recording.channels[c][i]));
    }
  }
  CHECK(worst < 1e-9);

  // gaze log at about 60 Hz with strictly increasing stamps and some gaps
  const auto& g = a.gaze_log;
  CHECK_NOTHROW(g.validate());
  const double duration = static_cast<double>(t.size()) / 125.0;
  CHECK(std::abs(static_cast<double>(g.size()) - duration * 60.0) <= 2.0);
  const auto missing = std::count_if(g.horizontal.begin(), g.horizontal.end(), [](auto& v) { return !v; });
  CHECK(missing > 0);
  CHECK(static_cast<double>(missing) < 0.1 * static_cast<double>(g.size()));
}
