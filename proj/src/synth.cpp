#include "eargaze/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "eargaze/error.hpp"

namespace eargaze::synth {

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

std::size_t samples_for(double seconds, double rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

// Independent, reproducible stream per (seed, purpose).
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(purpose >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kGazeStream = 0xffff0001ull;

}  // namespace

void GazeTrajectory::validate() const {
  if (!(sample_rate > 0.0)) throw ValidationError("trajectory: sample rate must be positive");
  if (horizontal.size() != vertical.size()) throw ValidationError("trajectory: component lengths differ");
  for (std::size_t i = 0; i < horizontal.size(); ++i) {
    if (!(std::abs(horizontal[i]) <= 90.0) || !(std::abs(vertical[i]) <= 90.0)) {
      throw ValidationError("trajectory: |angle| must not exceed 90 degrees");
    }
  }
}

double pursuit_angle(double amplitude_deg, double frequency_hz, double phase_rad, double t_s) {
  return amplitude_deg * std::sin(2.0 * std::numbers::pi * frequency_hz * t_s + phase_rad);
}

GazeTrajectory pursuit_trajectory_at_phase(double amplitude_deg, double frequency_hz, double duration_s, Axis axis,
                                           double phase_rad, double sample_rate_hz) {
  if (!(amplitude_deg > 0.0 && amplitude_deg < 90.0)) throw ValidationError("pursuit: amplitude must be in (0, 90)");
  if (!(frequency_hz > 0.0)) throw ValidationError("pursuit: frequency must be positive");
  if (!(duration_s > 0.0)) throw ValidationError("pursuit: duration must be positive");
  if (!(sample_rate_hz > 0.0)) throw ValidationError("pursuit: sample rate must be positive");
  const auto n = samples_for(duration_s, sample_rate_hz);
  GazeTrajectory traj;
  traj.sample_rate = sample_rate_hz;
  traj.horizontal.assign(n, 0.0);
  traj.vertical.assign(n, 0.0);
  auto& moving = axis == Axis::horizontal ? traj.horizontal : traj.vertical;
  for (std::size_t i = 0; i < n; ++i) {
    moving[i] = pursuit_angle(amplitude_deg, frequency_hz, phase_rad, static_cast<double>(i) / sample_rate_hz);
  }
  traj.trials.push_back({0, 0, n, axis, amplitude_deg, frequency_hz});
  return traj;
}

GazeTrajectory pursuit_trajectory(double amplitude_deg, double frequency_hz, double duration_s, Axis axis,
                                  std::uint64_t phase_seed, double sample_rate_hz) {
  auto rng = stream(phase_seed, 0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  return pursuit_trajectory_at_phase(amplitude_deg, frequency_hz, duration_s, axis, phase(rng), sample_rate_hz);
}

GazeTrajectory pursuit_session(const PursuitSessionParams& params, std::uint64_t seed) {
  if (params.amplitudes_deg.empty() || params.frequencies_hz.empty()) {
    throw ValidationError("pursuit session: need at least one amplitude and frequency");
  }
  if (params.lead_in_s < 0.0 || params.gap_s < 0.0) throw ValidationError("pursuit session: negative rest");
  GazeTrajectory session;
  session.sample_rate = params.sample_rate_hz;
  auto rest = [&](double seconds) {
    const auto n = samples_for(seconds, params.sample_rate_hz);
    session.horizontal.insert(session.horizontal.end(), n, 0.0);
    session.vertical.insert(session.vertical.end(), n, 0.0);
  };
  rest(params.lead_in_s);
  auto rng = stream(seed, 0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  int id = 0;
  for (double f : params.frequencies_hz) {
    for (double a : params.amplitudes_deg) {
      if (id > 0) rest(params.gap_s);
      const auto trial = pursuit_trajectory_at_phase(a, f, params.trial_duration_s, params.axis, phase(rng),
                                                     params.sample_rate_hz);
      const auto start = session.horizontal.size();
      session.horizontal.insert(session.horizontal.end(), trial.horizontal.begin(), trial.horizontal.end());
      session.vertical.insert(session.vertical.end(), trial.vertical.begin(), trial.vertical.end());
      session.trials.push_back({id++, start, session.horizontal.size(), params.axis, a, f});
    }
  }
  rest(params.gap_s);
  return session;
}

GazeTrajectory saccade_protocol(const SaccadeProtocolParams& params) {
  if (params.angles_deg.empty() || params.directions.empty()) {
    throw ValidationError("saccade protocol: need angles and directions");
  }
  for (double a : params.angles_deg) {
    if (!(a > 0.0 && a <= 90.0)) throw ValidationError("saccade protocol: angles must be in (0, 90]");
  }
  if (!(params.fixation_s > 0.0 && params.rest_s > 0.0)) {
    throw ValidationError("saccade protocol: durations must be positive");
  }
  if (params.cycles < 1) throw ValidationError("saccade protocol: need at least one cycle");

  GazeTrajectory traj;
  traj.sample_rate = params.sample_rate_hz;
  const auto fix_n = samples_for(params.fixation_s, params.sample_rate_hz);
  const auto rest_n = samples_for(params.rest_s, params.sample_rate_hz);
  auto hold = [&](double h, double v, std::size_t n) {
    traj.horizontal.insert(traj.horizontal.end(), n, h);
    traj.vertical.insert(traj.vertical.end(), n, v);
  };
  hold(0.0, 0.0, rest_n);
  int id = 0;
  for (int cycle = 0; cycle < params.cycles; ++cycle) {
    for (auto dir : params.directions) {
      for (double angle : params.angles_deg) {
        const double signed_angle = polarity_of(dir) * angle;
        const double h = axis_of(dir) == Axis::horizontal ? signed_angle : 0.0;
        const double v = axis_of(dir) == Axis::vertical ? signed_angle : 0.0;
        traj.saccades.push_back({id++, traj.size(), dir, angle, true});
        hold(h, v, fix_n);
        traj.saccades.push_back({id++, traj.size(), dir, angle, false});
        hold(0.0, 0.0, rest_n);
      }
    }
  }
  return traj;
}

Point3 gaze_direction(double horizontal_deg, double vertical_deg) {
  const double h = horizontal_deg * kRadPerDeg;
  const double v = vertical_deg * kRadPerDeg;
  return {std::sin(h) * std::cos(v), std::cos(h) * std::cos(v), std::sin(v)};
}

double dipole_potential(double horizontal_deg, double vertical_deg, const Point3& eye_center, double moment,
                        const Point3& electrode) {
  const auto r = electrode - eye_center;
  const double d = norm(r);
  if (!(d > 0.0)) throw ValidationError("dipole_potential: electrode coincides with the eye centre");
  return moment * dot(gaze_direction(horizontal_deg, vertical_deg), r) / (d * d * d);
}

namespace {

struct RingSlot {
  int number;
  double angle_deg;  // from straight ahead toward up, in the sagittal plane
};

constexpr std::array<RingSlot, 8> kRing{{
    {1, 45.0}, {2, 90.0}, {3, 180.0}, {4, 135.0}, {5, 225.0}, {6, 315.0}, {7, 270.0}, {8, 0.0},
}};

struct EyeGeometry {
  double x;
  double y;
};

EyeGeometry eye_geometry(const Anthropometrics& a) {
  const double eye_x = (a.inner_eye_distance_mm + a.outer_eye_distance_mm) / 4.0;
  const double dx = a.ear_half_width_mm - eye_x;
  const double d = a.eye_to_frontal_electrode_mm;
  if (!(d > std::abs(dx))) {
    throw ValidationError("head model: eye-to-electrode distance shorter than the lateral offset");
  }
  return {eye_x, a.ear_ring_radius_mm + std::sqrt(d * d - dx * dx)};
}

}  // namespace

ElectrodeLayout default_layout(const Anthropometrics& a) {
  if (!(a.ear_half_width_mm > 0.0 && a.ear_ring_radius_mm > 0.0)) {
    throw ValidationError("layout: ear geometry must be positive");
  }
  std::vector<Electrode> electrodes;
  for (const auto side : {EarSide::left, EarSide::right}) {
    const double x = side == EarSide::left ? -a.ear_half_width_mm : a.ear_half_width_mm;
    const char prefix = side == EarSide::left ? 'L' : 'R';
    for (int number = 1; number <= 8; ++number) {
      for (const auto& slot : kRing) {
        if (slot.number != number) continue;
        const double rad = slot.angle_deg * kRadPerDeg;
        // Snap to exact zeros so symmetric positions compare equal.
        auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
        electrodes.push_back({std::string(1, prefix) + std::to_string(number),
                              {x, snap(a.ear_ring_radius_mm * std::cos(rad)), snap(a.ear_ring_radius_mm * std::sin(rad))},
                              side});
      }
    }
  }
  electrodes.push_back({"REF", {0.0, -90.0, -80.0}, EarSide::midline});
  return ElectrodeLayout(std::move(electrodes));
}

void HeadModel::validate() const {
  if (eye_centers[0] == eye_centers[1]) throw ValidationError("head model: eyes coincide");
  if (!(dipole_moment > 0.0) || !std::isfinite(dipole_moment)) {
    throw ValidationError("head model: dipole moment must be positive");
  }
  if (!layout.contains(reference_label)) throw ValidationError("head model: reference not in layout");
  const auto& a = anthropometrics;
  if (!(a.inner_eye_distance_mm > 0 && a.outer_eye_distance_mm > a.inner_eye_distance_mm &&
        a.eye_to_frontal_electrode_mm > 0 && a.gold_lateral_offset_mm > 0 && a.gold_vertical_offset_mm > 0)) {
    throw ValidationError("head model: anthropometric distances must be positive");
  }
}

double calibrate_moment(const HeadModel& model, std::string_view a, std::string_view b, double angle_deg,
                        double target_uv) {
  const auto& pa = model.layout.at(a).position;
  const auto& pb = model.layout.at(b).position;
  auto montage = [&](double gaze) {
    double v = 0.0;
    for (const auto& eye : model.eye_centers) {
      v += dipole_potential(gaze, 0.0, eye, 1.0, pa) - dipole_potential(gaze, 0.0, eye, 1.0, pb);
    }
    return v;
  };
  const double unit = std::abs(montage(angle_deg) - montage(0.0));
  if (!(unit > 0.0)) throw ValidationError("calibration montage is insensitive to horizontal gaze");
  return target_uv / unit;
}

HeadModel default_head_model(const Anthropometrics& a) {
  HeadModel model;
  model.anthropometrics = a;
  model.layout = default_layout(a);
  const auto eye = eye_geometry(a);
  model.eye_centers = {Point3{-eye.x, eye.y, 0.0}, Point3{eye.x, eye.y, 0.0}};
  model.gold.horizontal_left = {-eye.x - a.gold_lateral_offset_mm, eye.y, 0.0};
  model.gold.horizontal_right = {eye.x + a.gold_lateral_offset_mm, eye.y, 0.0};
  model.gold.vertical_up = {eye.x, eye.y, a.gold_vertical_offset_mm};
  model.gold.vertical_down = {eye.x, eye.y, -a.gold_vertical_offset_mm};
  model.dipole_moment =
      calibrate_moment(model, kCalibrationLeft, kCalibrationRight, kCalibrationAngleDeg, kCalibrationDeflectionUv);
  model.validate();
  return model;
}

void NoiseConfig::validate() const {
  if (drift_amplitude_uv < 0 || white_noise_sd_uv < 0 || mains_amplitude_uv < 0) {
    throw ValidationError("noise: amplitudes must be non-negative");
  }
  if (!(drift_period_s > 0.0) || !(mains_frequency_hz > 0.0)) {
    throw ValidationError("noise: drift period and mains frequency must be positive");
  }
}

SimulatedSession simulate_recording(const HeadModel& model, const GazeTrajectory& trajectory,
                                    const NoiseConfig& noise, const SimulationOptions& options) {
  model.validate();
  trajectory.validate();
  noise.validate();
  if (!(options.gaze_rate_hz > 0.0)) throw ValidationError("simulation: gaze rate must be positive");
  if (!(options.gaze_missing_fraction >= 0.0 && options.gaze_missing_fraction < 1.0)) {
    throw ValidationError("simulation: missing fraction must be in [0, 1)");
  }
  if (!(options.gaze_delay_s >= 0.0 && options.gaze_jitter_s >= 0.0 && options.gaze_jitter_s < 1.0 / options.gaze_rate_hz)) {
    throw ValidationError("simulation: need delay >= 0 and jitter in [0, 1 / gaze rate)");
  }
  const auto n = trajectory.size();
  if (n < 2) throw ValidationError("simulation: trajectory too short");
  const double fs = trajectory.sample_rate;

  std::vector<Point3> sites;
  for (const auto& e : model.layout.electrodes()) sites.push_back(e.position);
  const auto gold_base = sites.size();
  sites.push_back(model.gold.horizontal_left);
  sites.push_back(model.gold.horizontal_right);
  sites.push_back(model.gold.vertical_up);
  sites.push_back(model.gold.vertical_down);
  const auto field = kernels::dipole_field(sites, model.eye_centers, model.dipole_moment, trajectory.horizontal,
                                           trajectory.vertical, options.execution);

  std::size_t ref_index = 0;
  for (std::size_t i = 0; i < model.layout.electrodes().size(); ++i) {
    if (model.layout.electrodes()[i].label == model.reference_label) ref_index = i;
  }

  SimulatedSession out;
  auto& rec = out.recording;
  rec.subject_id = options.subject_id;
  rec.reference_label = model.reference_label;
  rec.task_tag = options.task_tag;
  rec.sample_rate = fs;

  auto add_channel = [&](std::string label, const std::vector<double>& pos, const std::vector<double>& neg) {
    const auto channel_index = rec.labels.size();
    auto rng = stream(noise.seed, channel_index + 1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> white(0.0, 1.0);
    const double drift_phase = phase(rng);
    const double mains_phase = phase(rng);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      double v = pos[i] - neg[i];
      v += noise.drift_amplitude_uv * std::sin(2.0 * std::numbers::pi * t / noise.drift_period_s + drift_phase);
      v += noise.mains_amplitude_uv * std::sin(2.0 * std::numbers::pi * noise.mains_frequency_hz * t + mains_phase);
      v += noise.white_noise_sd_uv * white(rng);
      if (options.adc_resolution_uv > 0.0) {
        // k / steps_per_uv is the double nearest the decimal code, so it prints short.
        const double steps_per_uv = 1.0 / options.adc_resolution_uv;
        if (std::abs(steps_per_uv - std::round(steps_per_uv)) < 1e-9) {
          v = std::round(v * std::round(steps_per_uv)) / std::round(steps_per_uv);
        } else {
          v = std::round(v / options.adc_resolution_uv) * options.adc_resolution_uv;
        }
      }
      values[i] = v;
    }
    rec.labels.push_back(std::move(label));
    rec.channels.push_back(std::move(values));
  };

  for (std::size_t i = 0; i < model.layout.electrodes().size(); ++i) {
    if (i == ref_index) continue;
    add_channel(model.layout.electrodes()[i].label, field[i], field[ref_index]);
  }
  add_channel(std::string(kGoldHorizontal), field[gold_base + 1], field[gold_base]);
  add_channel(std::string(kGoldVertical), field[gold_base + 2], field[gold_base + 3]);

  auto& log = out.gaze_log;
  log.nominal_rate = options.gaze_rate_hz;
  auto rng = stream(noise.seed, kGazeStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double last_t = static_cast<double>(n - 1) / fs;
  std::vector<double> tau;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / options.gaze_rate_hz + options.gaze_jitter_s * unit(rng);
    if (t > last_t) break;
    tau.push_back(t);
  }
  for (std::size_t k = 0; k < tau.size(); ++k) {
    const auto idx = std::min(n - 1, static_cast<std::size_t>(std::llround(tau[k] * fs)));
    const bool edge = k == 0 || k + 1 == tau.size();
    const bool missing = !edge && unit(rng) < options.gaze_missing_fraction;
    log.timestamps.push_back(tau[k] + options.gaze_delay_s);
    if (missing) {
      log.horizontal.emplace_back();
      log.vertical.emplace_back();
    } else {
      log.horizontal.emplace_back(trajectory.horizontal[idx]);
      log.vertical.emplace_back(trajectory.vertical[idx]);
    }
  }
  return out;
}

}  // namespace eargaze::synth
