#include "eargaze/types.hpp"

#include <set>

#include "eargaze/error.hpp"

namespace eargaze {

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::data: return "data";
    case ErrorCategory::internal: return "internal";
  }
  return "internal";
}

std::string_view to_string(Axis axis) noexcept {
  return axis == Axis::horizontal ? "horizontal" : "vertical";
}

std::string_view to_string(Direction direction) noexcept {
  switch (direction) {
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::up: return "up";
    case Direction::down: return "down";
  }
  return "left";
}

std::string_view to_string(EarSide side) noexcept {
  switch (side) {
    case EarSide::left: return "left";
    case EarSide::right: return "right";
    case EarSide::midline: return "midline";
  }
  return "midline";
}

Axis parse_axis(std::string_view text) {
  if (text == "horizontal") return Axis::horizontal;
  if (text == "vertical") return Axis::vertical;
  throw ValidationError("unknown axis '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
  if (text == "left") return Direction::left;
  if (text == "right") return Direction::right;
  if (text == "up") return Direction::up;
  if (text == "down") return Direction::down;
  throw ValidationError("unknown direction '" + std::string(text) + "'");
}

EarSide parse_ear_side(std::string_view text) {
  if (text == "left") return EarSide::left;
  if (text == "right") return EarSide::right;
  if (text == "midline") return EarSide::midline;
  throw ValidationError("unknown ear side '" + std::string(text) + "'");
}

Axis axis_of(Direction direction) noexcept {
  return (direction == Direction::left || direction == Direction::right) ? Axis::horizontal
                                                                         : Axis::vertical;
}

int polarity_of(Direction direction) noexcept {
  return (direction == Direction::right || direction == Direction::up) ? 1 : -1;
}

std::string_view gold_label(Axis axis) noexcept {
  return axis == Axis::horizontal ? kGoldHorizontal : kGoldVertical;
}

bool is_gold_label(std::string_view label) noexcept {
  return label == kGoldHorizontal || label == kGoldVertical;
}

ElectrodeLayout::ElectrodeLayout(std::vector<Electrode> electrodes) : electrodes_(std::move(electrodes)) {
  std::set<std::string> seen;
  int left = 0;
  int right = 0;
  for (std::size_t i = 0; i < electrodes_.size(); ++i) {
    const auto& e = electrodes_[i];
    if (e.label.empty()) throw ValidationError("layout: empty electrode label");
    if (!seen.insert(e.label).second) throw ValidationError("layout: duplicate label " + e.label);
    for (std::size_t j = 0; j < i; ++j) {
      if (electrodes_[j].position == e.position) {
        throw ValidationError("layout: " + electrodes_[j].label + " and " + e.label +
                              " share a position");
      }
    }
    if (e.side == EarSide::left) ++left;
    if (e.side == EarSide::right) ++right;
  }
  if (left < 2 || right < 2) throw ValidationError("layout: each ear needs at least two electrodes");
}

const Electrode* ElectrodeLayout::find(std::string_view label) const noexcept {
  for (const auto& e : electrodes_) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

const Electrode& ElectrodeLayout::at(std::string_view label) const {
  const auto* e = find(label);
  if (e == nullptr) throw DataError("layout has no electrode '" + std::string(label) + "'");
  return *e;
}

bool Recording::has_channel(std::string_view label) const noexcept {
  for (const auto& l : labels) {
    if (l == label) return true;
  }
  return false;
}

const std::vector<double>& Recording::channel(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return channels[i];
  }
  throw DataError("recording " + subject_id + "/" + task_tag + " has no channel '" +
                  std::string(label) + "'");
}

Signal Recording::signal(std::string_view label) const { return Signal{channel(label), sample_rate}; }

void Recording::validate(const ElectrodeLayout& layout) const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ValidationError("recording: sample rate must be positive");
  }
  if (labels.size() != channels.size()) throw ValidationError("recording: label/channel count mismatch");
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& label = labels[i];
    if (!seen.insert(label).second) throw ValidationError("recording: duplicate channel " + label);
    if (!is_gold_label(label) && !layout.contains(label)) {
      throw ValidationError("recording: channel " + label + " is not in the layout");
    }
    if (label == reference_label) {
      throw ValidationError("recording: reference " + label + " cannot be an output channel");
    }
    if (channels[i].size() != channels.front().size()) {
      throw ValidationError("recording: channels differ in length");
    }
    for (double v : channels[i]) {
      if (!std::isfinite(v)) throw ValidationError("recording: non-finite sample in " + label);
    }
  }
}

void ScreenGeometry::validate() const {
  if (!(width_px > 0.0 && height_px > 0.0 && pixel_pitch_mm > 0.0 && viewing_distance_mm > 0.0)) {
    throw ValidationError("screen geometry values must all be positive");
  }
}

void GazeLog::validate() const {
  if (!(nominal_rate > 0.0)) throw ValidationError("gaze log: nominal rate must be positive");
  if (horizontal.size() != timestamps.size() || vertical.size() != timestamps.size()) {
    throw ValidationError("gaze log: component lengths differ");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (!(timestamps[i] > timestamps[i - 1])) {
      throw ValidationError("gaze log: timestamps must be strictly increasing");
    }
  }
}

}  // namespace eargaze
