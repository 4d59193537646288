#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eargaze/kernels.hpp"
#include "eargaze/types.hpp"

namespace eargaze::synth {

struct SaccadeAnnotation {
  int id{0};
  std::size_t onset{0};  // first sample at the new target
  Direction direction{Direction::left};
  double target_angle_deg{0.0};  // unsigned eccentricity of the peripheral target
  bool outward{true};            // false for the return to the centre

  bool operator==(const SaccadeAnnotation&) const = default;
};

struct PursuitAnnotation {
  int id{0};
  std::size_t start{0};
  std::size_t end{0};  // exclusive
  Axis axis{Axis::horizontal};
  double amplitude_deg{0.0};
  double frequency_hz{0.0};

  bool operator==(const PursuitAnnotation&) const = default;
};

/// Ground-truth gaze in degrees (right/up positive) with protocol annotations.
struct GazeTrajectory {
  double sample_rate{125.0};
  std::vector<double> horizontal;
  std::vector<double> vertical;
  std::vector<SaccadeAnnotation> saccades;
  std::vector<PursuitAnnotation> trials;

  std::size_t size() const noexcept { return horizontal.size(); }
  const std::vector<double>& component(Axis axis) const noexcept {
    return axis == Axis::horizontal ? horizontal : vertical;
  }
  void validate() const;
};

/// A * sin(2 pi f t + phase).
double pursuit_angle(double amplitude_deg, double frequency_hz, double phase_rad, double t_s);

GazeTrajectory pursuit_trajectory_at_phase(double amplitude_deg, double frequency_hz, double duration_s, Axis axis,
                                           double phase_rad, double sample_rate_hz = 125.0);
/// Start phase drawn uniformly from [0, 2 pi) with the given seed.
GazeTrajectory pursuit_trajectory(double amplitude_deg, double frequency_hz, double duration_s, Axis axis,
                                  std::uint64_t phase_seed, double sample_rate_hz = 125.0);

struct PursuitSessionParams {
  Axis axis{Axis::horizontal};
  std::vector<double> amplitudes_deg{2.5, 5.0, 7.5, 10.0, 12.5, 15.0};
  std::vector<double> frequencies_hz{0.33, 0.5, 1.0};
  double trial_duration_s{6.0};
  double lead_in_s{2.0};  // central fixation before the first trial
  double gap_s{1.0};      // central fixation between trials
  double sample_rate_hz{125.0};
};

/// Every (frequency, amplitude) trial back to back, each annotated.
GazeTrajectory pursuit_session(const PursuitSessionParams& params, std::uint64_t seed);

struct SaccadeProtocolParams {
  std::vector<double> angles_deg{2.5, 5.0, 7.5, 10.0, 12.5, 15.0};
  std::vector<Direction> directions{Direction::left, Direction::right, Direction::up, Direction::down};
  double fixation_s{2.0};
  double rest_s{2.0};
  int cycles{1};
  double sample_rate_hz{125.0};
};

/// Central rest, then for each direction and angle: jump out, fixate, jump
/// back, rest. Both the outward and the return jumps are annotated.
GazeTrajectory saccade_protocol(const SaccadeProtocolParams& params);

/// Unit gaze vector: yaw by the horizontal angle, then pitch by the vertical.
Point3 gaze_direction(double horizontal_deg, double vertical_deg);

/// Point-dipole potential moment * (p . r) / |r|^3 at `electrode` for an eye
/// at `eye_center` looking along the given gaze. Throws ValidationError if the
/// electrode sits on the eye centre.
double dipole_potential(double horizontal_deg, double vertical_deg, const Point3& eye_center, double moment,
                        const Point3& electrode);

struct Anthropometrics {
  double inner_eye_distance_mm{31.6};
  double outer_eye_distance_mm{105.3};
  double eye_to_frontal_electrode_mm{52.2};
  double ear_half_width_mm{70.0};   // ear canal distance from the midline
  double ear_ring_radius_mm{40.0};
  double gold_lateral_offset_mm{25.0};   // canthus electrode, lateral of the eye centre
  double gold_vertical_offset_mm{30.0};  // supra/infra-orbital electrodes

  bool operator==(const Anthropometrics&) const = default;
};

struct GoldElectrodes {
  Point3 horizontal_left;
  Point3 horizontal_right;
  Point3 vertical_up;
  Point3 vertical_down;
};

struct HeadModel {
  std::array<Point3, 2> eye_centers{};  // left, right
  double dipole_moment{1.0};            // µV mm^2
  ElectrodeLayout layout;
  std::string reference_label{"REF"};
  GoldElectrodes gold;
  Anthropometrics anthropometrics;

  void validate() const;
};

inline constexpr std::string_view kCalibrationLeft = "L8";
inline constexpr std::string_view kCalibrationRight = "R8";
inline constexpr double kCalibrationAngleDeg = 15.0;
inline constexpr double kCalibrationDeflectionUv = 40.16;

/// Ring of eight electrodes per ear on a circle in the sagittal plane through
/// the ear canal, 45 degrees apart, with L8/R8 in front and L3/R3 behind at
/// eye level, plus a midline reference "REF" at the nape.
ElectrodeLayout default_layout(const Anthropometrics& anthropometrics = {});

/// Eyes placed from the anthropometric distances; the moment is calibrated
/// so a 15 degree rightward gaze shift moves L8-R8 by 40.16 µV.
HeadModel default_head_model(const Anthropometrics& anthropometrics = {});

/// Moment that makes |(a-b)(gaze = angle right) - (a-b)(gaze = 0)| equal the
/// target deflection, for a model with the given geometry.
double calibrate_moment(const HeadModel& model, std::string_view a, std::string_view b, double angle_deg,
                        double target_uv);

struct NoiseConfig {
  double drift_amplitude_uv{20.0};
  double drift_period_s{30.0};
  double white_noise_sd_uv{2.0};
  double mains_amplitude_uv{1.0};
  double mains_frequency_hz{50.0};
  std::uint64_t seed{0};

  static NoiseConfig none() { return {0.0, 30.0, 0.0, 0.0, 50.0, 0}; }
  void validate() const;
};

struct SimulationOptions {
  std::string subject_id{"S01"};
  std::string task_tag{"synthetic"};
  double gaze_rate_hz{60.0};
  double gaze_missing_fraction{0.0};
  double gaze_delay_s{0.0};   // eye-tracker clock offset relative to the EOG
  double gaze_jitter_s{0.0};  // uniform [0, jitter) added to each gaze timestamp
  double adc_resolution_uv{0.0};  // > 0 rounds every channel to this step
  kernels::Execution execution{kernels::Execution::parallel};
};

struct SimulatedSession {
  Recording recording;
  GazeLog gaze_log;
};

/// One channel per layout electrode except the reference, each referenced to
/// it, plus the gold hEOG/vEOG bipolar channels; independent drift, white and
/// mains noise per channel. Deterministic in NoiseConfig::seed.
SimulatedSession simulate_recording(const HeadModel& model, const GazeTrajectory& trajectory,
                                    const NoiseConfig& noise, const SimulationOptions& options = {});

}  // namespace eargaze::synth
