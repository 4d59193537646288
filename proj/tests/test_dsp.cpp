#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "eargaze/dsp.hpp"
#include "eargaze/error.hpp"

using namespace eargaze;

namespace {

constexpr double kPi = std::numbers::pi;

Signal sine(double freq, double seconds, double fs = 125.0, double amp = 1.0) {
  Signal s{{}, fs};
  const auto n = static_cast<std::size_t>(seconds * fs);
  for (std::size_t i = 0; i < n; ++i) s.samples.push_back(amp * std::sin(2 * kPi * freq * static_cast<double>(i) / fs));
  return s;
}

// Single-bin Hann-windowed DFT amplitude of x[from..] at `freq`. The window keeps the
// slowly decaying 0.1 Hz start-up tail from leaking into the bin.
double dft_amplitude(const std::vector<double>& x, std::size_t from, double freq, double fs) {
  double re = 0, im = 0, gain = 0;
  const auto n = x.size() - from;
  for (std::size_t i = from; i < x.size(); ++i) {
    const double w = 0.5 - 0.5 * std::cos(2 * kPi * static_cast<double>(i - from) / static_cast<double>(n));
    const double ph = 2 * kPi * freq * static_cast<double>(i) / fs;
    re += w * x[i] * std::cos(ph);
    im -= w * x[i] * std::sin(ph);
    gain += w;
  }
  return 2.0 * std::hypot(re, im) / gain;
}

std::vector<double> normal_eq_detrend(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x, sy += y[i], sxx += x * x, sxy += x * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - (icpt + slope * static_cast<double>(i));
  return out;
}

const dsp::FilterSpec kSpec{0.1, 15.0, 5, 125.0};

}  // namespace

TEST_CASE("filter spec validation") {
  CHECK_NOTHROW(kSpec.validate());
  CHECK_THROWS_AS((dsp::FilterSpec{15.0, 0.1, 5, 125}).validate(), ValidationError);
  CHECK_THROWS_AS((dsp::FilterSpec{0.0, 15.0, 5, 125}).validate(), ValidationError);
  CHECK_THROWS_AS((dsp::FilterSpec{0.1, 70.0, 5, 125}).validate(), ValidationError);
  CHECK_THROWS_AS((dsp::FilterSpec{0.1, 15.0, 0, 125}).validate(), ValidationError);
  CHECK_THROWS_AS(dsp::bandpass_filter(Signal{std::vector<double>(15, 1.0), 125}, kSpec), ValidationError);
  CHECK_NOTHROW(dsp::bandpass_filter(Signal{std::vector<double>(16, 1.0), 125}, kSpec));
}

TEST_CASE("Butterworth bandpass response") {
  const auto sos = dsp::design_butterworth_bandpass(kSpec);
  CHECK(sos.sections.size() == 5);
  // analytic magnitude of the digital prototype: 1/sqrt(1 + (W/B)^(2n)),
  // W = (w^2 - w0^2)/w on pre-warped frequencies
  auto warp = [](double f) { return 2 * 125.0 * std::tan(kPi * f / 125.0); };
  const double wl = warp(0.1), wh = warp(15.0), w0sq = wl * wh, bw = wh - wl;
  for (double f : {0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 15.0, 20.0, 40.0, 50.0, 60.0}) {
    const double w = warp(f);
    const double expected = 1.0 / std::sqrt(1.0 + std::pow(((w * w - w0sq) / w) / bw, 10));
    CHECK(std::abs(dsp::frequency_response(sos, f, 125.0)) == doctest::Approx(expected).epsilon(1e-6));
  }
  CHECK(std::abs(dsp::frequency_response(sos, 0.1, 125.0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("bandpass filter: DC, passband and stopband") {
  Signal dc{std::vector<double>(1250, 100.0), 125.0};
  const auto out = dsp::bandpass_filter(dc, kSpec);
  CHECK(out.size() == dc.size());
  CHECK(std::abs(out.samples.back()) < 1.0);  // >= 20 dB below 100

  const auto five = dsp::bandpass_filter(sine(5.0, 10.0), kSpec);
  const double a5 = dft_amplitude(five.samples, 250, 5.0, 125.0);
  CHECK(a5 >= 0.95);
  CHECK(a5 <= 1.0);
  CHECK(a5 == doctest::Approx(std::abs(dsp::frequency_response(dsp::design_butterworth_bandpass(kSpec), 5.0, 125.0)))
                  .epsilon(1e-5));

  const auto fifty = dsp::bandpass_filter(sine(50.0, 10.0), kSpec);
  CHECK(dft_amplitude(fifty.samples, 250, 50.0, 125.0) <= 0.1);
}

TEST_CASE("bandpass filter is linear") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Signal x{{}, 125}, y{{}, 125}, mix{{}, 125};
  for (int i = 0; i < 2000; ++i) {
    x.samples.push_back(nd(rng));
    y.samples.push_back(nd(rng) + 5);
    mix.samples.push_back(2.5 * x.samples.back() - 0.7 * y.samples.back());
  }
  for (auto mode : {dsp::FilterMode::causal, dsp::FilterMode::zero_phase}) {
    const auto fx = dsp::bandpass_filter(x, kSpec, {mode});
    const auto fy = dsp::bandpass_filter(y, kSpec, {mode});
    const auto fm = dsp::bandpass_filter(mix, kSpec, {mode});
    double scale = 0, worst = 0;
    for (std::size_t i = 0; i < fm.size(); ++i) {
      scale = std::max(scale, std::abs(fm.samples[i]));
      worst = std::max(worst, std::abs(fm.samples[i] - (2.5 * fx.samples[i] - 0.7 * fy.samples[i])));
    }
    CHECK(worst <= 1e-9 * scale);
  }
}

TEST_CASE("zero-phase mode has no delay") {
  const auto s = sine(2.0, 20.0);
  const auto z = dsp::bandpass_filter(s, kSpec, {dsp::FilterMode::zero_phase});
  double best = 0;
  int best_lag = 99;
  for (int lag = -5; lag <= 5; ++lag) {
    double acc = 0;
    for (std::size_t i = 500; i + 500 < s.size(); ++i) acc += s.samples[i] * z.samples[static_cast<std::size_t>(static_cast<long>(i) + lag)];
    if (acc > best) best = acc, best_lag = lag;
  }
  CHECK(best_lag == 0);
}

TEST_CASE("detrend") {
  CHECK_THROWS_AS(dsp::detrend(Signal{{1.0}, 125}), ValidationError);
  for (double v : dsp::detrend(Signal{{0, 1, 2, 3}, 125}).samples) CHECK(std::abs(v) < 1e-12);
  for (double v : dsp::detrend(Signal{{5, 5, 5}, 125}).samples) CHECK(std::abs(v) < 1e-12);

  Signal s{{}, 125};
  for (int i = 0; i < 500; ++i) s.samples.push_back(std::sin(0.07 * i) + 0.03 * i - 4);
  const auto got = dsp::detrend(s);
  const auto want = normal_eq_detrend(s.samples);
  double mean = 0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(got.samples[i] == doctest::Approx(want[i]).epsilon(1e-9));
    mean += got.samples[i];
  }
  CHECK(std::abs(mean / 500) < 1e-12);
  // nothing left for a second pass to remove
  const auto again = dsp::detrend(got);
  for (std::size_t i = 0; i < again.size(); ++i) CHECK(again.samples[i] == doctest::Approx(got.samples[i]));
}

TEST_CASE("mean filter") {
  const Signal s{{0, 0, 1, 0, 0}, 125};
  const auto m = dsp::mean_filter(s, 3);
  const std::vector<double> expect{0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0};
  for (std::size_t i = 0; i < 5; ++i) CHECK(m.samples[i] == doctest::Approx(expect[i]));
  CHECK(dsp::mean_filter(s, 1) == s);
  const Signal c{std::vector<double>(40, 2.5), 125};
  for (double v : dsp::mean_filter(c, 50).samples) CHECK(v == doctest::Approx(2.5));

  // shrinking edges, direct windowed sums elsewhere
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  Signal r{{}, 125};
  for (int i = 0; i < 300; ++i) r.samples.push_back(u(rng));
  for (int w : {2, 7, 50}) {
    const auto f = dsp::mean_filter(r, w);
    for (int i = 0; i < 300; ++i) {
      const int lo = std::max(0, i - (w - 1) / 2);
      const int hi = std::min(299, i + w / 2);
      double acc = 0;
      for (int j = lo; j <= hi; ++j) acc += r.samples[static_cast<std::size_t>(j)];
      CHECK(f.samples[static_cast<std::size_t>(i)] == doctest::Approx(acc / (hi - lo + 1)));
    }
  }
  CHECK_THROWS_AS(dsp::mean_filter(r, 0), ValidationError);
}

TEST_CASE("normalize") {
  const auto n = dsp::normalize(Signal{{0, 5, 10}, 125});
  CHECK(n.samples == std::vector<double>{-1, 0, 1});
  CHECK(dsp::normalize(Signal{{7, 7, 7}, 125}).samples == std::vector<double>{0, 0, 0});

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(3, 10);
  Signal r{{}, 125};
  for (int i = 0; i < 100; ++i) r.samples.push_back(nd(rng));
  const auto a = dsp::normalize(r);
  CHECK(*std::min_element(a.samples.begin(), a.samples.end()) == -1.0);
  CHECK(*std::max_element(a.samples.begin(), a.samples.end()) == 1.0);
  const auto b = dsp::normalize(a);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.samples[i] == doctest::Approx(a.samples[i]));
}

TEST_CASE("preprocess_eog is the explicit composition") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  Signal r{{}, 125};
  for (int i = 0; i < 400; ++i) r.samples.push_back(nd(rng) + 0.01 * i);
  const auto got = dsp::preprocess_eog(r, 50);
  const auto want = dsp::normalize(dsp::mean_filter(dsp::detrend(r), 50));
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got.samples[i] == doctest::Approx(want.samples[i]));
    CHECK(std::abs(got.samples[i]) <= 1.0);
  }
  const auto nod = dsp::preprocess_eog(r, 50, false);
  const auto want2 = dsp::normalize(dsp::mean_filter(r, 50));
  for (std::size_t i = 0; i < nod.size(); ++i) CHECK(nod.samples[i] == doctest::Approx(want2.samples[i]));

  for (double v : dsp::preprocess_eog(Signal{std::vector<double>(60, 4.0), 125}).samples) CHECK(v == 0.0);
  CHECK_THROWS_AS(dsp::preprocess_eog(Signal{std::vector<double>(49, 1.0), 125}), ValidationError);
}

TEST_CASE("fill_and_resample") {
  GazeLog ramp;
  for (int i = 0; i < 120; ++i) {
    ramp.timestamps.push_back(i / 60.0);
    ramp.horizontal.push_back(3.0 * i / 60.0 - 1.0);
    ramp.vertical.push_back(-2.0 * i / 60.0);
  }
  const auto out = dsp::fill_and_resample(ramp, 125.0);
  const auto n = out.horizontal.size();
  CHECK(n == static_cast<std::size_t>(std::floor((119.0 / 60.0) * 125.0)) + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / 125.0;
    CHECK(out.horizontal.samples[k] == doctest::Approx(3.0 * t - 1.0));
    CHECK(out.vertical.samples[k] == doctest::Approx(-2.0 * t));
  }
  CHECK(out.horizontal.sample_rate == 125.0);

  auto holed = ramp;
  holed.horizontal[40] = std::nullopt;
  holed.vertical[40] = std::nullopt;
  const auto filled = dsp::fill_and_resample(holed, 125.0);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(filled.horizontal.samples[k] == doctest::Approx(out.horizontal.samples[k]).epsilon(1e-12));
  }

  GazeLog wave;
  for (int i = 0; i < 600; ++i) {
    wave.timestamps.push_back(i / 60.0);
    wave.horizontal.push_back(std::sin(2 * kPi * i / 60.0));
    wave.vertical.push_back(0.0);
  }
  const auto rs = dsp::fill_and_resample(wave, 125.0);
  double worst = 0;
  for (std::size_t k = 0; k < rs.horizontal.size(); ++k) {
    worst = std::max(worst, std::abs(rs.horizontal.samples[k] - std::sin(2 * kPi * static_cast<double>(k) / 125.0)));
  }
  // linear interpolation error bound (h^2/8)|f''| at 60 Hz is ~1.4e-3 of amplitude
  CHECK(worst <= (1.0 / 60 / 60 / 8) * 4 * kPi * kPi);
  CHECK(worst > 1e-3);  // so 1e-3 needs the cubic option

  dsp::ResampleOptions cubic;
  cubic.method = dsp::Interpolation::cubic;
  const auto rc = dsp::fill_and_resample(wave, 125.0, cubic);
  double worst_cubic = 0;
  for (std::size_t k = 0; k < rc.horizontal.size(); ++k) {
    worst_cubic = std::max(worst_cubic,
                           std::abs(rc.horizontal.samples[k] - std::sin(2 * kPi * static_cast<double>(k) / 125.0)));
  }
  CHECK(worst_cubic <= 1e-3);

  GazeLog sparse;
  sparse.timestamps = {0, 0.1, 0.2};
  sparse.horizontal = {1.0, std::nullopt, std::nullopt};
  sparse.vertical = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(dsp::fill_and_resample(sparse, 125.0), Error);
}

TEST_CASE("resample_linear keeps endpoints and lines") {
  const std::vector<double> v{0, 2, 4, 6, 8};
  const auto r = dsp::resample_linear(v, 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(r[i] == doctest::Approx(static_cast<double>(i)));
  const auto d = dsp::resample_linear(v, 3);
  CHECK(d == std::vector<double>{0, 4, 8});
}
