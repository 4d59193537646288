#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "eargaze/types.hpp"

namespace eargaze::dsp {

struct FilterSpec {
  double low_cut_hz{0.1};
  double high_cut_hz{15.0};
  int order{5};
  double sample_rate_hz{125.0};

  /// 0 < low < high < fs/2, order >= 1; throws ValidationError otherwise.
  void validate() const;
  bool operator==(const FilterSpec&) const = default;
};

/// One second-order section, a0 normalised to 1, direct form II transposed.
struct Biquad {
  double b0{1.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
};

struct SosFilter {
  std::vector<Biquad> sections;
};

/// Butterworth bandpass as `order` cascaded biquads (bilinear transform with
/// pre-warped band edges), unit gain at the geometric centre frequency.
SosFilter design_butterworth_bandpass(const FilterSpec& spec);

std::complex<double> frequency_response(const SosFilter& filter, double freq_hz, double sample_rate_hz);

enum class FilterMode { causal, zero_phase };

// `steady` starts every section in the state it would hold after an infinitely
// long run of the first input sample, so a DC offset produces no start-up step.
enum class InitialState { zero, steady };

struct FilterOptions {
  FilterMode mode{FilterMode::causal};
  InitialState initial{InitialState::steady};
};

std::vector<double> sos_filter(const SosFilter& filter, std::span<const double> input,
                               InitialState initial = InitialState::steady);

/// Requires size > 3 * order.
Signal bandpass_filter(const Signal& signal, const FilterSpec& spec, FilterOptions options = {});

/// Removes the least-squares line. Requires size >= 2.
Signal detrend(const Signal& signal);

/// Centred moving average over [i - (w-1)/2, i + w/2]; the window shrinks at
/// the edges instead of padding.
Signal mean_filter(const Signal& signal, int window);

/// Affine map of [min, max] onto [-1, 1]; constant input maps to zeros.
Signal normalize(const Signal& signal);

/// Detrend, mean filter, normalize. Set `with_detrend` false for the chain
/// variant where the bandpass stands in for the detrend.
Signal preprocess_eog(const Signal& signal, int window = 50, bool with_detrend = true);

enum class Interpolation { linear, cubic };

struct ResampleOptions {
  /// First output time; defaults to the first log timestamp.
  std::optional<double> origin_s;
  /// Last admissible output time; defaults to the last log timestamp.
  std::optional<double> end_s;
  Interpolation method{Interpolation::linear};
};

struct GazeSignals {
  Signal horizontal;
  Signal vertical;

  const Signal& component(Axis axis) const noexcept { return axis == Axis::horizontal ? horizontal : vertical; }
};

/// Fills dropped samples by interpolation over timestamps and resamples both
/// axes onto t_k = origin + k / rate, k = 0 .. floor((end - origin) * rate).
/// Values outside the valid span hold the nearest valid sample.
GazeSignals fill_and_resample(const GazeLog& log, double target_rate_hz, const ResampleOptions& options = {});

/// Resamples a sequence onto `length` evenly spaced points spanning the same
/// support (first and last samples preserved), by linear interpolation.
std::vector<double> resample_linear(std::span<const double> values, std::size_t length);

}  // namespace eargaze::dsp
