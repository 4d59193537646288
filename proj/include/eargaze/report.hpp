#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eargaze/montage.hpp"
#include "eargaze/saccade.hpp"
#include "eargaze/synth.hpp"

// JSON and CSV forms of the analysis products. Every writer has a reader that
// returns an equal value.
namespace eargaze::report {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const montage::CorrelationReport& report);
montage::CorrelationReport correlation_report_from_json(const json& value);

json to_json(const saccade::MaeTable& table);
saccade::MaeTable mae_table_from_json(const json& value);

json to_json(const saccade::BlandAltmanSummary& summary);
saccade::BlandAltmanSummary bland_altman_from_json(const json& value);

json to_json(const stats::CorrelationResult& result);

std::string_view to_string(montage::Aggregation aggregation) noexcept;
montage::Aggregation parse_aggregation(std::string_view text);

/// montage,mean_r_eog,mean_r_cam,sd_r_eog,sd_r_cam
void write_montage_plot(const montage::CorrelationReport& report, const fs::path& path);

void write_pursuit_annotations(std::span<const synth::PursuitAnnotation> trials, const fs::path& path);
std::vector<synth::PursuitAnnotation> load_pursuit_annotations(const fs::path& path);
void write_saccade_annotations(std::span<const synth::SaccadeAnnotation> saccades, const fs::path& path);
std::vector<synth::SaccadeAnnotation> load_saccade_annotations(const fs::path& path);

void write_events(std::span<const saccade::SaccadeEvent> events, const fs::path& path);
std::vector<saccade::SaccadeEvent> load_events(const fs::path& path);

/// A deflection tagged with the signal it came from.
struct SourcedDeflection {
  std::string source;   // "earEOG" or "gold"
  std::string channel;  // montage name or gold label
  saccade::DeflectionSample sample;

  bool operator==(const SourcedDeflection&) const = default;
};
void write_deflections(std::span<const SourcedDeflection> rows, const fs::path& path);
std::vector<SourcedDeflection> load_deflections(const fs::path& path);

struct SourcedWaveform {
  std::string source;
  std::string channel;
  saccade::WaveformCell cell;
};
/// source,channel,direction,target_angle_deg,count,index,mean_uv,sd_uv
void write_waveforms(std::span<const SourcedWaveform> waves, const fs::path& path);

}  // namespace eargaze::report
