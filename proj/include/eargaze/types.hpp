#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eargaze {

enum class Axis { horizontal, vertical };
enum class Direction { left, right, up, down };
enum class EarSide { left, right, midline };

std::string_view to_string(Axis axis) noexcept;
std::string_view to_string(Direction direction) noexcept;
std::string_view to_string(EarSide side) noexcept;
Axis parse_axis(std::string_view text);
Direction parse_direction(std::string_view text);
EarSide parse_ear_side(std::string_view text);

Axis axis_of(Direction direction) noexcept;
/// +1 for right/up, -1 for left/down.
int polarity_of(Direction direction) noexcept;

/// Head-centred frame in millimetres: x right, y forward, z up.
struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  bool operator==(const Point3&) const = default;
};

inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Point3& p) { return std::sqrt(dot(p, p)); }

/// Uniformly sampled series. Potentials are in µV, gaze in degrees.
struct Signal {
  std::vector<double> samples;
  double sample_rate{0.0};

  std::size_t size() const noexcept { return samples.size(); }
  bool operator==(const Signal&) const = default;
};

struct Electrode {
  std::string label;
  Point3 position;
  EarSide side{EarSide::midline};

  bool operator==(const Electrode&) const = default;
};

class ElectrodeLayout {
 public:
  ElectrodeLayout() = default;
  /// Throws ValidationError on duplicate labels, coincident positions, or an
  /// ear with fewer than two electrodes.
  explicit ElectrodeLayout(std::vector<Electrode> electrodes);

  const std::vector<Electrode>& electrodes() const noexcept { return electrodes_; }
  const Electrode* find(std::string_view label) const noexcept;
  bool contains(std::string_view label) const noexcept { return find(label) != nullptr; }
  const Electrode& at(std::string_view label) const;

  bool operator==(const ElectrodeLayout&) const = default;

 private:
  std::vector<Electrode> electrodes_;
};

// Reserved channel labels for the bipolar gold-standard EOG around the eyes.
inline constexpr std::string_view kGoldHorizontal = "hEOG";
inline constexpr std::string_view kGoldVertical = "vEOG";

std::string_view gold_label(Axis axis) noexcept;
bool is_gold_label(std::string_view label) noexcept;

struct Recording {
  std::string subject_id;
  std::string reference_label;
  std::string task_tag;
  double sample_rate{0.0};
  std::vector<std::string> labels;
  std::vector<std::vector<double>> channels;  // one per label, equal lengths

  std::size_t length() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
  bool has_channel(std::string_view label) const noexcept;
  const std::vector<double>& channel(std::string_view label) const;
  Signal signal(std::string_view label) const;

  /// Checks the structural invariants against a layout. Gold labels are
  /// accepted without a layout entry.
  void validate(const ElectrodeLayout& layout) const;

  bool operator==(const Recording&) const = default;
};

struct ScreenGeometry {
  double width_px{1920.0};
  double height_px{1080.0};
  double pixel_pitch_mm{0.26};
  double viewing_distance_mm{500.0};

  /// 23" monitor, 1920x1080, 0.26 mm/px, 50 cm viewing distance.
  static ScreenGeometry lab_default() { return {}; }
  void validate() const;

  bool operator==(const ScreenGeometry&) const = default;
};

/// Eye-tracker samples in degrees; std::nullopt marks a dropped sample.
struct GazeLog {
  std::vector<double> timestamps;
  std::vector<std::optional<double>> horizontal;
  std::vector<std::optional<double>> vertical;
  double nominal_rate{60.0};

  std::size_t size() const noexcept { return timestamps.size(); }
  const std::vector<std::optional<double>>& component(Axis axis) const noexcept {
    return axis == Axis::horizontal ? horizontal : vertical;
  }
  void validate() const;

  bool operator==(const GazeLog&) const = default;
};

}  // namespace eargaze
