#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eargaze/dsp.hpp"
#include "eargaze/kernels.hpp"
#include "eargaze/montage.hpp"
#include "eargaze/saccade.hpp"
#include "eargaze/synth.hpp"

namespace eargaze::config {

struct Paths {
  std::string data_dir;   // empty: synthesize
  std::string layout;     // empty: <data_dir>/layout.json, or the default ring
  std::string screen;     // empty: <data_dir>/screen.json, or the lab default
  std::string output_dir{"out"};
  std::string overrides_csv;  // optional manual saccade labels
};

struct GazeSimulation {
  double rate_hz{60.0};
  double missing_fraction{0.05};
  double delay_s{0.02};
  double jitter_s{0.002};
};

struct Synthetic {
  int subjects{16};
  synth::NoiseConfig noise;  // seed is derived per subject
  GazeSimulation gaze;
  double adc_resolution_uv{0.02};
};

struct Protocol {
  double sample_rate_hz{125.0};
  synth::PursuitSessionParams pursuit;
  // three repetitions, as run with the participants
  synth::SaccadeProtocolParams saccade = [] {
    synth::SaccadeProtocolParams p;
    p.cycles = 3;
    return p;
  }();
};

struct Preprocess {
  dsp::FilterSpec filter;  // sample rate follows the protocol
  dsp::FilterOptions options;
  bool write_signals{false};  // inside `pipeline`; the `preprocess` command always writes
};

struct MontageStage {
  double tolerance_deg{15.0};
  montage::RankOptions rank;
  double alpha{0.05};
  std::size_t wilcoxon_exact_max_n{15};
  dsp::Interpolation gaze_interpolation{dsp::Interpolation::linear};
};

struct SaccadeStage {
  saccade::SegmentationParams segmentation;
  saccade::DeflectionParams deflection;
  std::string montage_horizontal{"top"};  // "top" or an explicit "A-B"
  std::string montage_vertical{"top"};
  saccade::ModelScope model_scope{saccade::ModelScope::per_axis};
};

struct PipelineConfig {
  std::uint64_t seed{7};
  Paths paths;
  Synthetic synthetic;
  Protocol protocol;
  Preprocess preprocess;
  MontageStage montage;
  SaccadeStage saccade;
  kernels::Execution execution{kernels::Execution::parallel};

  /// Range checks against every stage's preconditions; throws ValidationError.
  void validate() const;
  /// Existence of referenced input paths; throws ValidationError.
  void check_paths() const;
};

nlohmann::json to_json(const PipelineConfig& config);
/// Missing keys take defaults; unknown keys are a ValidationError.
PipelineConfig from_json(const nlohmann::json& value);

/// Reads the file (if any), applies "dotted.key=value" overrides (the value is
/// parsed as JSON when it can be, else taken as a string), then validates.
PipelineConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);
/// FNV-1a of the canonical JSON dump.
std::string config_hash(const PipelineConfig& config);

}  // namespace eargaze::config
