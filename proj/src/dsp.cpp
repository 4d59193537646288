#include "eargaze/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eargaze/error.hpp"

namespace eargaze::dsp {

using cplx = std::complex<double>;

void FilterSpec::validate() const {
  if (!(sample_rate_hz > 0.0)) throw ValidationError("filter: sample rate must be positive");
  if (!(low_cut_hz > 0.0 && low_cut_hz < high_cut_hz && high_cut_hz < sample_rate_hz / 2.0)) {
    throw ValidationError("filter: need 0 < low_cut < high_cut < fs/2 (got " + std::to_string(low_cut_hz) +
                          ", " + std::to_string(high_cut_hz) + ")");
  }
  if (order < 1) throw ValidationError("filter: order must be >= 1");
}

SosFilter design_butterworth_bandpass(const FilterSpec& spec) {
  spec.validate();
  const double fs = spec.sample_rate_hz;
  const int n = spec.order;
  const double k = 2.0 * fs;
  const double w1 = k * std::tan(std::numbers::pi * spec.low_cut_hz / fs);
  const double w2 = k * std::tan(std::numbers::pi * spec.high_cut_hz / fs);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  auto bilinear = [k](cplx s) { return (k + s) / (k - s); };
  auto section_from = [](cplx pa, cplx pb) {
    Biquad q;
    q.b0 = 1.0;
    q.b1 = 0.0;
    q.b2 = -1.0;  // zeros at z = +1 (DC) and z = -1 (Nyquist)
    q.a1 = -(pa + pb).real();
    q.a2 = (pa * pb).real();
    return q;
  };

  SosFilter filter;
  for (int i = 0; i < n; ++i) {
    const cplx proto = std::polar(1.0, std::numbers::pi * (2.0 * i + n + 1) / (2.0 * n));
    if (proto.imag() < -1e-12) continue;  // handled with its conjugate
    const cplx a = proto * bw / 2.0;
    const cplx d = std::sqrt(a * a - w0 * w0);
    const cplx s1 = a + d;
    const cplx s2 = a - d;
    if (std::abs(proto.imag()) <= 1e-12) {
      filter.sections.push_back(section_from(bilinear(s1), bilinear(s2)));
    } else {
      filter.sections.push_back(section_from(bilinear(s1), std::conj(bilinear(s1))));
      filter.sections.push_back(section_from(bilinear(s2), std::conj(bilinear(s2))));
    }
  }

  const double center_hz = std::atan(w0 / k) * fs / std::numbers::pi;
  const double gain = 1.0 / std::abs(frequency_response(filter, center_hz, fs));
  const double per_section = std::pow(gain, 1.0 / static_cast<double>(filter.sections.size()));
  for (auto& q : filter.sections) {
    q.b0 *= per_section;
    q.b1 *= per_section;
    q.b2 *= per_section;
  }
  return filter;
}

cplx frequency_response(const SosFilter& filter, double freq_hz, double sample_rate_hz) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
  cplx h = 1.0;
  for (const auto& q : filter.sections) {
    h *= (q.b0 + q.b1 * zinv + q.b2 * zinv * zinv) / (1.0 + q.a1 * zinv + q.a2 * zinv * zinv);
  }
  return h;
}

std::vector<double> sos_filter(const SosFilter& filter, std::span<const double> input, InitialState initial) {
  std::vector<double> y(input.begin(), input.end());
  if (y.empty()) return y;
  double u = initial == InitialState::steady ? y.front() : 0.0;
  for (const auto& q : filter.sections) {
    // Steady state for a constant input u: output g*u with g the section DC gain.
    const double g = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    double z1 = (g - q.b0) * u;
    double z2 = (q.b2 - q.a2 * g) * u;
    for (auto& v : y) {
      const double x = v;
      const double out = q.b0 * x + z1;
      z1 = q.b1 * x - q.a1 * out + z2;
      z2 = q.b2 * x - q.a2 * out;
      v = out;
    }
    u *= g;
  }
  return y;
}

Signal bandpass_filter(const Signal& signal, const FilterSpec& spec, FilterOptions options) {
  spec.validate();
  if (std::abs(signal.sample_rate - spec.sample_rate_hz) > 1e-9 * spec.sample_rate_hz) {
    throw ValidationError("bandpass: signal rate does not match filter rate");
  }
  if (signal.size() <= static_cast<std::size_t>(3 * spec.order)) {
    throw ValidationError("bandpass: signal too short for order " + std::to_string(spec.order));
  }
  const auto filter = design_butterworth_bandpass(spec);
  auto out = sos_filter(filter, signal.samples, options.initial);
  if (options.mode == FilterMode::zero_phase) {
    std::reverse(out.begin(), out.end());
    out = sos_filter(filter, out, options.initial);
    std::reverse(out.begin(), out.end());
  }
  return {std::move(out), signal.sample_rate};
}

Signal detrend(const Signal& signal) {
  const auto n = signal.size();
  if (n < 2) throw ValidationError("detrend: need at least 2 samples");
  // Centred abscissa keeps the normal equations well conditioned.
  const double tc = (static_cast<double>(n) - 1.0) / 2.0;
  double mean = 0.0;
  for (double v : signal.samples) mean += v;
  mean /= static_cast<double>(n);
  double sty = 0.0;
  double stt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - tc;
    sty += t * (signal.samples[i] - mean);
    stt += t * t;
  }
  const double slope = sty / stt;
  Signal out{std::vector<double>(n), signal.sample_rate};
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = signal.samples[i] - mean - slope * (static_cast<double>(i) - tc);
  }
  return out;
}

Signal mean_filter(const Signal& signal, int window) {
  if (window < 1) throw ValidationError("mean_filter: window must be >= 1");
  if (signal.size() == 0) throw ValidationError("mean_filter: empty signal");
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const std::ptrdiff_t before = (window - 1) / 2;
  const std::ptrdiff_t after = window / 2;
  std::vector<double> prefix(signal.size() + 1, 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + signal.samples[i];
  Signal out{std::vector<double>(signal.size()), signal.sample_rate};
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - before);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + after);
    out.samples[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

Signal normalize(const Signal& signal) {
  if (signal.size() == 0) throw ValidationError("normalize: empty signal");
  const auto [lo, hi] = std::minmax_element(signal.samples.begin(), signal.samples.end());
  Signal out{std::vector<double>(signal.size(), 0.0), signal.sample_rate};
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  const double low = *lo;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    out.samples[i] = std::clamp(2.0 * (signal.samples[i] - low) / span - 1.0, -1.0, 1.0);
  }
  return out;
}

Signal preprocess_eog(const Signal& signal, int window, bool with_detrend) {
  if (signal.size() < 50) throw ValidationError("preprocess_eog: need at least 50 samples");
  if (with_detrend) return normalize(mean_filter(detrend(signal), window));
  return normalize(mean_filter(signal, window));
}

namespace {

struct Knots {
  std::vector<double> t;
  std::vector<double> v;
};

Knots valid_knots(const std::vector<double>& times, const std::vector<std::optional<double>>& values) {
  Knots k;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] && std::isfinite(*values[i])) {
      k.t.push_back(times[i]);
      k.v.push_back(*values[i]);
    }
  }
  return k;
}

std::vector<double> hermite_slopes(const Knots& k) {
  const auto n = k.t.size();
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      m[i] = (k.v[1] - k.v[0]) / (k.t[1] - k.t[0]);
    } else if (i + 1 == n) {
      m[i] = (k.v[i] - k.v[i - 1]) / (k.t[i] - k.t[i - 1]);
    } else {
      // Derivative of the parabola through the three neighbouring knots.
      const double h0 = k.t[i] - k.t[i - 1];
      const double h1 = k.t[i + 1] - k.t[i];
      const double d0 = (k.v[i] - k.v[i - 1]) / h0;
      const double d1 = (k.v[i + 1] - k.v[i]) / h1;
      m[i] = (h1 * d0 + h0 * d1) / (h0 + h1);
    }
  }
  return m;
}

std::vector<double> evaluate(const Knots& k, const std::vector<double>& grid, Interpolation method) {
  std::vector<double> slopes;
  if (method == Interpolation::cubic) slopes = hermite_slopes(k);
  std::vector<double> out(grid.size());
  std::size_t seg = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    if (t <= k.t.front()) {
      out[g] = k.v.front();
      continue;
    }
    if (t >= k.t.back()) {
      out[g] = k.v.back();
      continue;
    }
    while (k.t[seg + 1] < t) ++seg;  // grid is increasing
    const double h = k.t[seg + 1] - k.t[seg];
    const double s = (t - k.t[seg]) / h;
    if (method == Interpolation::linear) {
      out[g] = k.v[seg] + s * (k.v[seg + 1] - k.v[seg]);
    } else {
      const double s2 = s * s;
      const double s3 = s2 * s;
      out[g] = (2 * s3 - 3 * s2 + 1) * k.v[seg] + (s3 - 2 * s2 + s) * h * slopes[seg] +
               (-2 * s3 + 3 * s2) * k.v[seg + 1] + (s3 - s2) * h * slopes[seg + 1];
    }
  }
  return out;
}

}  // namespace

GazeSignals fill_and_resample(const GazeLog& log, double target_rate_hz, const ResampleOptions& options) {
  log.validate();
  if (!(target_rate_hz > 0.0)) throw ValidationError("resample: target rate must be positive");
  const auto kh = valid_knots(log.timestamps, log.horizontal);
  const auto kv = valid_knots(log.timestamps, log.vertical);
  if (kh.t.size() < 2 || kv.t.size() < 2) throw DataError("resample: fewer than 2 valid gaze samples");

  const double origin = options.origin_s.value_or(log.timestamps.front());
  const double end = options.end_s.value_or(log.timestamps.back());
  if (!(end >= origin)) throw ValidationError("resample: end precedes origin");
  // Small slack so an end time landing exactly on the grid is not lost to rounding.
  const auto count = static_cast<std::size_t>(std::floor((end - origin) * target_rate_hz + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = origin + static_cast<double>(i) / target_rate_hz;

  return {Signal{evaluate(kh, grid, options.method), target_rate_hz},
          Signal{evaluate(kv, grid, options.method), target_rate_hz}};
}

std::vector<double> resample_linear(std::span<const double> values, std::size_t length) {
  if (values.empty() || length == 0) throw ValidationError("resample_linear: empty input or output");
  std::vector<double> out(length);
  if (values.size() == 1 || length == 1) {
    std::fill(out.begin(), out.end(), values.front());
    return out;
  }
  const double step = static_cast<double>(values.size() - 1) / static_cast<double>(length - 1);
  for (std::size_t i = 0; i < length; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto lo = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    out[i] = values[lo] + frac * (values[lo + 1] - values[lo]);
  }
  return out;
}

}  // namespace eargaze::dsp
