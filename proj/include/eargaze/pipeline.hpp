#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eargaze/config.hpp"
#include "eargaze/montage.hpp"
#include "eargaze/report.hpp"
#include "eargaze/saccade.hpp"
#include "eargaze/synth.hpp"

namespace eargaze::pipeline {

namespace fs = std::filesystem;

enum class Command { synth, preprocess, montages, saccades, regress, pipeline };

Command parse_command(std::string_view text);
std::string_view to_string(Command command) noexcept;

struct PursuitSession {
  Recording recording;
  GazeLog gaze;
  std::vector<synth::PursuitAnnotation> trials;
};

struct SaccadeSession {
  Recording recording;
  GazeLog gaze;
  std::vector<synth::SaccadeAnnotation> saccades;
};

struct SubjectData {
  std::string id;
  PursuitSession pursuit_horizontal;
  PursuitSession pursuit_vertical;
  SaccadeSession saccade;
};

struct Dataset {
  ElectrodeLayout layout;
  ScreenGeometry screen;
  std::vector<SubjectData> subjects;
};

/// Independent stream per (seed, stream, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

/// Subjects S01.. from the default head model, each with its own noise and
/// pursuit phases.
Dataset synthesize(const config::PipelineConfig& config);

/// <dir>/layout.json, <dir>/screen.json and per subject
/// <dir>/<id>/{pursuit_horizontal,pursuit_vertical,saccade}.csv with their
/// .meta.json, .gaze.csv and .annotations.csv companions.
std::vector<fs::path> write_dataset(const Dataset& dataset, const fs::path& dir);
Dataset load_dataset(const fs::path& dir, const config::PipelineConfig& config);

/// Bandpass every recording channel; gaze logs are left as they are.
Dataset filter_dataset(const Dataset& dataset, const config::PipelineConfig& config);

struct MontageResults {
  montage::CorrelationReport horizontal;
  montage::CorrelationReport vertical;
};
/// Expects a filtered dataset.
MontageResults analyse_montages(const Dataset& filtered, const config::PipelineConfig& config);

struct SaccadeResults {
  std::string montage_horizontal;
  std::string montage_vertical;
  std::vector<saccade::SaccadeEvent> events;
  std::vector<report::SourcedDeflection> deflections;
  std::vector<report::SourcedWaveform> waveforms;
  nlohmann::json summary;
};
SaccadeResults analyse_saccades(const Dataset& filtered, const config::PipelineConfig& config,
                                const MontageResults& montages);

struct RegressionResults {
  saccade::MaeTable horizontal_ear;
  saccade::MaeTable horizontal_gold;
  saccade::MaeTable vertical_ear;
  saccade::MaeTable vertical_gold;
  saccade::BlandAltmanSummary bland_altman;  // horizontal earEOG vs gold predictions
};
RegressionResults regress(const SaccadeResults& saccades, const config::PipelineConfig& config);

/// Runs one command, writing under config.paths.output_dir. Returns the
/// written files relative to the output directory.
std::vector<std::string> run(Command command, const config::PipelineConfig& config);

}  // namespace eargaze::pipeline
