#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eargaze/kernels.hpp"
#include "eargaze/stats.hpp"
#include "eargaze/synth.hpp"
#include "eargaze/types.hpp"

namespace eargaze::saccade {

struct SegmentationParams {
  double velocity_threshold_uv{2.0};  // per sample, on the central difference
  double min_duration_s{0.008};
  double max_duration_s{0.3};
  double search_before_s{0.1};  // around the annotated onset
  double search_after_s{0.6};

  void validate() const;
  bool operator==(const SegmentationParams&) const = default;
};

struct SaccadeEvent {
  std::string subject_id;
  int annotation_id{0};
  Direction direction{Direction::left};
  double target_angle_deg{0.0};
  bool outward{true};
  std::size_t start_idx{0};
  std::size_t end_idx{1};  // exclusive
  bool valid{false};
  std::string reason;  // empty when valid

  bool operator==(const SaccadeEvent&) const = default;
};

/// Locates each annotated saccade in the gold EOG of its axis. Within the
/// search window the peak of |v| (v the central difference) is found and the
/// event grown outward while |v| stays above the threshold. Annotations of the
/// other axis are skipped.
std::vector<SaccadeEvent> segment_saccades(const Signal& gold, std::span<const synth::SaccadeAnnotation> annotations,
                                           Axis axis, const std::string& subject_id,
                                           const SegmentationParams& params = {});

/// Both gold channels of a filtered recording, events in annotation order.
std::vector<SaccadeEvent> segment_session(const Recording& filtered,
                                          std::span<const synth::SaccadeAnnotation> annotations,
                                          const SegmentationParams& params = {});

/// Manual labels keyed by (subject_id, annotation_id). Columns:
/// subject_id,annotation_id,start_idx,end_idx,valid
struct EventOverride {
  std::string subject_id;
  int annotation_id{0};
  std::size_t start_idx{0};
  std::size_t end_idx{0};
  bool valid{true};

  bool operator==(const EventOverride&) const = default;
};

std::vector<EventOverride> load_overrides(const std::filesystem::path& path);
void write_overrides(std::span<const EventOverride> overrides, const std::filesystem::path& path);
/// Replaces the matching events' bounds and validity; unknown keys are a DataError.
void apply_overrides(std::vector<SaccadeEvent>& events, std::span<const EventOverride> overrides);

/// [start - context, end + context), clipped to the signal.
struct WindowSpan {
  std::size_t begin{0};
  std::size_t end{0};
};
WindowSpan event_window(const SaccadeEvent& event, std::size_t signal_length, double sample_rate,
                        double context_s);

struct WaveformParams {
  std::size_t resample_len{250};
  double context_s{0.4};
};

struct WaveformCell {
  Direction direction{Direction::left};
  double target_angle_deg{0.0};
  int count{0};
  std::vector<double> mean;
  std::vector<double> sd;  // sample SD, zero for a single event
};

/// Per (direction, angle) cell over valid events: each window has the mean of
/// its pre-saccade part subtracted, is resampled to resample_len, then averaged
/// pointwise. Cells without valid events are absent.
std::vector<WaveformCell> average_saccade_waveform(std::span<const SaccadeEvent> events, const Signal& signal,
                                                   const WaveformParams& params = {});

/// Events of several recordings, each with the signal they index into.
struct EventSource {
  std::span<const SaccadeEvent> events;
  const Signal* signal{nullptr};
};
std::vector<WaveformCell> average_saccade_waveform(std::span<const EventSource> sources,
                                                   const WaveformParams& params = {});

enum class DeflectionSign {
  first_minus_last,  // mean(first ten) - mean(last ten)
  last_minus_first,
};

/// Throws ValidationError for fewer than 20 samples.
double voltage_deflection(std::span<const double> window, DeflectionSign sign = DeflectionSign::first_minus_last);

struct DeflectionSample {
  std::string subject_id;
  Direction direction{Direction::left};
  double target_angle_deg{0.0};
  double true_angle_change{0.0};  // signed degrees from the eye tracker
  double deflection{0.0};         // µV

  bool operator==(const DeflectionSample&) const = default;
};

struct DeflectionParams {
  std::size_t resample_len{250};
  double context_s{0.2};
  DeflectionSign sign{DeflectionSign::first_minus_last};
  bool include_returns{false};
};

/// One sample per valid event: the event window of `signal` is resampled and
/// its deflection taken; the angle change is gaze(last) - gaze(first) over the
/// same window of `gaze` (eye-tracker angle on the signal's grid).
std::vector<DeflectionSample> extract_deflections(std::span<const SaccadeEvent> events, const Signal& signal,
                                                  const Signal& gaze, const DeflectionParams& params = {});

/// Pearson r between the per-angle mean deflection and the signed target
/// angle for one direction. Needs three or more angles.
stats::CorrelationResult deflection_linearity(std::span<const DeflectionSample> samples, Direction direction);

/// Pearson r between two sources' per-angle mean deflections for one direction.
stats::CorrelationResult deflection_agreement(std::span<const DeflectionSample> a,
                                              std::span<const DeflectionSample> b, Direction direction);

struct RegressionModel {
  double slope{0.0};      // deg / µV
  double intercept{0.0};  // deg

  double predict(double deflection) const noexcept { return slope * deflection + intercept; }
  bool operator==(const RegressionModel&) const = default;
};

/// Least squares true_angle_change = slope * deflection + intercept. Throws
/// DegenerateError unless there are two distinct deflections.
RegressionModel fit_angle_regressor(std::span<const DeflectionSample> samples);

enum class ModelScope { per_axis, per_direction };

struct LosoOptions {
  ModelScope scope{ModelScope::per_axis};
  kernels::Execution execution{kernels::Execution::parallel};
};

/// Held-out prediction for every input sample, in input order.
std::vector<double> loso_predict(std::span<const DeflectionSample> samples, const LosoOptions& options = {});

struct MaeRow {
  std::optional<Direction> direction;  // empty on the grand total
  std::optional<double> target_angle_deg;  // empty on totals
  int count{0};
  double mae{0.0};
  double sd{0.0};

  bool operator==(const MaeRow&) const = default;
};

struct MaeTable {
  Axis axis{Axis::horizontal};
  bool recommended{true};
  std::vector<MaeRow> rows;  // per cell, then per direction, then the grand total
  std::vector<double> predictions;
  bool operator==(const MaeTable&) const = default;

  const MaeRow& total() const { return rows.back(); }
};

/// LOSO over subjects; needs two or more. Vertical tables are marked not
/// recommended.
MaeTable loso_evaluate(std::span<const DeflectionSample> samples, Axis axis, const LosoOptions& options = {});

/// "4.34° ± 3.99°"
std::string format_mae(double mae, double sd);
/// "-14.16 µV"
std::string format_deflection(double uv);

struct BlandAltmanSummary {
  double mean_difference{0.0};
  double sd_difference{0.0};
  double loa_low{0.0};
  double loa_high{0.0};
  std::vector<double> means;
  std::vector<double> differences;

  bool operator==(const BlandAltmanSummary&) const = default;
};

/// Differences a - b against means (a + b) / 2; LoA = mean +- 1.96 sample SD.
BlandAltmanSummary bland_altman(std::span<const double> a, std::span<const double> b);

}  // namespace eargaze::saccade
