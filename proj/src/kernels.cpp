#include "eargaze/kernels.hpp"

#include <omp.h>

#include "eargaze/error.hpp"
#include "eargaze/synth.hpp"

namespace eargaze::kernels {

int max_threads() noexcept { return omp_get_max_threads(); }

std::vector<std::optional<stats::CorrelationResult>> lagged_correlations(std::span<const LagTask> tasks,
                                                                          Execution execution) {
  std::vector<std::optional<stats::CorrelationResult>> out(tasks.size());
  if (execution == Execution::serial) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      try {
        out[i] = stats::max_lagged_correlation_reference(tasks[i].x, tasks[i].y, tasks[i].max_lag);
      } catch (const DegenerateError&) {
      }
    }
    return out;
  }

  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  // Exceptions must not escape an OpenMP region; validation failures are
  // captured and rethrown after the loop.
  std::vector<std::optional<std::string>> failures(tasks.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& task = tasks[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = stats::max_lagged_correlation(task.x, task.y, task.max_lag);
    } catch (const DegenerateError&) {
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (f) throw ValidationError(*f);
  }
  return out;
}

std::vector<std::vector<double>> dipole_field(std::span<const Point3> electrodes, std::span<const Point3> eyes,
                                              double moment, std::span<const double> gaze_horizontal_deg,
                                              std::span<const double> gaze_vertical_deg, Execution execution) {
  if (gaze_horizontal_deg.size() != gaze_vertical_deg.size()) {
    throw ValidationError("dipole_field: gaze components differ in length");
  }
  for (const auto& e : electrodes) {
    for (const auto& eye : eyes) {
      if (e == eye) throw ValidationError("dipole_field: electrode coincides with an eye centre");
    }
  }
  const auto n = gaze_horizontal_deg.size();
  std::vector<std::vector<double>> out(electrodes.size(), std::vector<double>(n, 0.0));

  if (execution == Execution::serial) {
    for (std::size_t e = 0; e < electrodes.size(); ++e) {
      for (std::size_t s = 0; s < n; ++s) {
        double v = 0.0;
        for (const auto& eye : eyes) {
          v += synth::dipole_potential(gaze_horizontal_deg[s], gaze_vertical_deg[s], eye, moment, electrodes[e]);
        }
        out[e][s] = v;
      }
    }
    return out;
  }

  // Eye-to-electrode geometry is fixed; only the dipole orientation varies.
  struct Lever {
    Point3 scaled;  // moment * r / |r|^3
  };
  std::vector<Lever> levers(electrodes.size() * eyes.size());
  for (std::size_t e = 0; e < electrodes.size(); ++e) {
    for (std::size_t k = 0; k < eyes.size(); ++k) {
      const auto r = electrodes[e] - eyes[k];
      const double d = norm(r);
      levers[e * eyes.size() + k].scaled = (moment / (d * d * d)) * r;
    }
  }
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    const auto dir = synth::gaze_direction(gaze_horizontal_deg[idx], gaze_vertical_deg[idx]);
    for (std::size_t e = 0; e < electrodes.size(); ++e) {
      double v = 0.0;
      for (std::size_t k = 0; k < eyes.size(); ++k) v += dot(dir, levers[e * eyes.size() + k].scaled);
      out[e][idx] = v;
    }
  }
  return out;
}

}  // namespace eargaze::kernels
