#pragma once

#include <optional>
#include <span>
#include <vector>

#include "eargaze/stats.hpp"
#include "eargaze/types.hpp"

// Data-parallel hot loops. Each kernel has a plain serial path that is the
// reference implementation and an OpenMP path used by the pipeline; tests
// hold the two against each other.
namespace eargaze::kernels {

enum class Execution { serial, parallel };

struct LagTask {
  std::span<const double> x;
  std::span<const double> y;
  int max_lag{0};
};

/// One max-|r| lag search per task; std::nullopt where every shift is
/// degenerate. Serial runs the two-pass reference search, parallel the
/// prefix-sum search across OpenMP threads.
std::vector<std::optional<stats::CorrelationResult>> lagged_correlations(std::span<const LagTask> tasks,
                                                                          Execution execution);

/// Summed dipole potential of every eye at every electrode, for each gaze
/// sample. Result is indexed [electrode][sample].
std::vector<std::vector<double>> dipole_field(std::span<const Point3> electrodes, std::span<const Point3> eyes,
                                              double moment, std::span<const double> gaze_horizontal_deg,
                                              std::span<const double> gaze_vertical_deg, Execution execution);

int max_threads() noexcept;

}  // namespace eargaze::kernels
