#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eargaze/dsp.hpp"
#include "eargaze/kernels.hpp"
#include "eargaze/stats.hpp"
#include "eargaze/synth.hpp"
#include "eargaze/types.hpp"

namespace eargaze::montage {

struct Montage {
  std::string a;
  std::string b;
  Axis axis_class{Axis::horizontal};

  std::string name() const { return a + "-" + b; }
  bool operator==(const Montage&) const = default;
};

/// Parses "L8-R8". The axis class is not encoded in the name.
Montage parse_montage(const std::string& name, Axis axis);

/// channel_a - channel_b, sample by sample.
Signal differential_signal(const Recording& recording, const Montage& montage);

/// Elevation of the connecting vector above the horizontal (x-y) plane.
double pair_elevation_deg(const Point3& a, const Point3& b);

/// Every unordered ear-electrode pair whose connecting vector lies within
/// `tolerance_deg` of the requested axis: elevation <= tol for horizontal,
/// >= 90 - tol for vertical. Midline electrodes are never paired. Each pair
/// is oriented left before right, then front before back, then top first.
std::vector<Montage> classify_montages(const ElectrodeLayout& layout, Axis axis, double tolerance_deg = 15.0);

/// One six-second pursuit window, already bandpass filtered.
struct PursuitTrial {
  std::string subject_id;
  int trial_id{0};
  Recording recording;  // window of the filtered session
  Signal gold;          // filtered gold EOG for the trial axis
  Signal gaze;          // filled, resampled, filtered eye-tracker angle on the same grid
};

struct TrialPreparation {
  dsp::FilterSpec filter;
  dsp::FilterOptions filter_options;
  dsp::Interpolation gaze_interpolation{dsp::Interpolation::linear};
  bool recording_prefiltered{false};
};

/// Filters a whole session (EOG and resampled gaze), then cuts the annotated
/// trials of `axis` out of it.
std::vector<PursuitTrial> prepare_pursuit_trials(const Recording& session, const GazeLog& gaze,
                                                 const std::vector<synth::PursuitAnnotation>& trials, Axis axis,
                                                 const TrialPreparation& prep);

enum class Aggregation { within_subject, pooled };

struct RankOptions {
  int max_lag_eog{12};
  int max_lag_cam{64};
  int mean_window{50};
  bool with_detrend{true};
  Aggregation aggregation{Aggregation::within_subject};
  kernels::Execution execution{kernels::Execution::parallel};
};

struct MontageScore {
  Montage montage;
  double mean_r_eog{0.0};
  double mean_r_cam{0.0};
  double sd_r_eog{0.0};
  double sd_r_cam{0.0};
  int polarity_eog{1};  // sign applied so the montage correlates positively
  int polarity_cam{1};
  std::vector<std::optional<double>> subject_r_eog;  // aligned with CorrelationReport::subjects
  std::vector<std::optional<double>> subject_r_cam;
  int excluded_trials{0};

  bool operator==(const MontageScore&) const = default;
};

struct Posthoc {
  bool computed{false};
  std::string reason;
  std::vector<std::vector<std::optional<double>>> p_matrix;  // Bonferroni-corrected; diagonal empty
  int degenerate_pairs{0};

  bool operator==(const Posthoc&) const = default;
};

struct SignificanceTest {
  double friedman_statistic{0.0};
  double friedman_p{1.0};
  int subjects_used{0};
  Posthoc posthoc;

  bool operator==(const SignificanceTest&) const = default;
};

struct CorrelationReport {
  Axis axis{Axis::horizontal};
  Aggregation aggregation{Aggregation::within_subject};
  std::vector<std::string> subjects;
  std::vector<MontageScore> montages;  // sorted by mean_r_eog, descending
  int trials{0};
  int excluded_trials{0};
  std::optional<SignificanceTest> eog;
  std::optional<SignificanceTest> cam;

  bool operator==(const CorrelationReport&) const = default;
};

/// Preprocesses each montage, the gold EOG and the gaze angle per trial,
/// finds the max-|r| lag against both ground truths, Fisher-aggregates per
/// subject and then across subjects.
CorrelationReport rank_montages(const std::vector<PursuitTrial>& trials, const std::vector<Montage>& montages,
                                Axis axis, const RankOptions& options = {});

/// Friedman over subjects x montages per ground truth; pairwise Wilcoxon with
/// Bonferroni correction only when the Friedman p falls below alpha.
CorrelationReport montage_significance(CorrelationReport report, double alpha = 0.05,
                                       stats::WilcoxonOptions wilcoxon = {});

/// "r = 0.81"
std::string format_r(double r);

}  // namespace eargaze::montage
