#include "eargaze/montage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "eargaze/error.hpp"

namespace eargaze::montage {

Montage parse_montage(const std::string& name, Axis axis) {
  const auto dash = name.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == name.size() || name.find('-', dash + 1) != std::string::npos) {
    throw ValidationError("montage '" + name + "' is not of the form A-B");
  }
  Montage m{name.substr(0, dash), name.substr(dash + 1), axis};
  if (m.a == m.b) throw ValidationError("montage '" + name + "' pairs an electrode with itself");
  return m;
}

Signal differential_signal(const Recording& recording, const Montage& montage) {
  const auto& a = recording.channel(montage.a);
  const auto& b = recording.channel(montage.b);
  Signal out{std::vector<double>(a.size()), recording.sample_rate};
  for (std::size_t i = 0; i < a.size(); ++i) out.samples[i] = a[i] - b[i];
  return out;
}

double pair_elevation_deg(const Point3& a, const Point3& b) {
  const auto d = b - a;
  const double planar = std::hypot(d.x, d.y);
  return std::atan2(std::abs(d.z), planar) * 180.0 / std::numbers::pi;
}

std::vector<Montage> classify_montages(const ElectrodeLayout& layout, Axis axis, double tolerance_deg) {
  if (!(tolerance_deg >= 0.0 && tolerance_deg < 45.0)) {
    throw ValidationError("classify_montages: tolerance must be in [0, 45) degrees");
  }
  std::vector<const Electrode*> ears;
  for (const auto& e : layout.electrodes()) {
    if (e.side != EarSide::midline) ears.push_back(&e);
  }
  auto first = [](const Electrode* p, const Electrode* q) {
    if (p->position.x != q->position.x) return p->position.x < q->position.x;
    if (p->position.y != q->position.y) return p->position.y > q->position.y;
    return p->position.z > q->position.z;
  };
  std::vector<Montage> out;
  for (std::size_t i = 0; i < ears.size(); ++i) {
    for (std::size_t j = i + 1; j < ears.size(); ++j) {
      const double elevation = pair_elevation_deg(ears[i]->position, ears[j]->position);
      const bool keep = axis == Axis::horizontal ? elevation <= tolerance_deg : elevation >= 90.0 - tolerance_deg;
      if (!keep) continue;
      const auto* p = ears[i];
      const auto* q = ears[j];
      if (first(q, p)) std::swap(p, q);
      out.push_back({p->label, q->label, axis});
    }
  }
  return out;
}

namespace {

Recording slice(const Recording& rec, std::size_t start, std::size_t end) {
  Recording out;
  out.subject_id = rec.subject_id;
  out.reference_label = rec.reference_label;
  out.task_tag = rec.task_tag;
  out.sample_rate = rec.sample_rate;
  out.labels = rec.labels;
  for (const auto& ch : rec.channels) {
    out.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(start),
                              ch.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

Signal slice(const Signal& s, std::size_t start, std::size_t end) {
  return {std::vector<double>(s.samples.begin() + static_cast<std::ptrdiff_t>(start),
                              s.samples.begin() + static_cast<std::ptrdiff_t>(end)),
          s.sample_rate};
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

}  // namespace

std::vector<PursuitTrial> prepare_pursuit_trials(const Recording& session, const GazeLog& gaze,
                                                 const std::vector<synth::PursuitAnnotation>& trials, Axis axis,
                                                 const TrialPreparation& prep) {
  const auto n = session.length();
  const double fs = session.sample_rate;
  Recording filtered = session;
  if (!prep.recording_prefiltered) {
    for (auto& ch : filtered.channels) {
      ch = dsp::bandpass_filter(Signal{ch, fs}, prep.filter, prep.filter_options).samples;
    }
  }
  dsp::ResampleOptions resample;
  resample.origin_s = 0.0;
  resample.end_s = static_cast<double>(n - 1) / fs;
  resample.method = prep.gaze_interpolation;
  const auto gaze_grid = dsp::fill_and_resample(gaze, fs, resample);
  auto gaze_axis = gaze_grid.component(axis);
  gaze_axis.samples.resize(n, gaze_axis.samples.empty() ? 0.0 : gaze_axis.samples.back());
  gaze_axis = dsp::bandpass_filter(gaze_axis, prep.filter, prep.filter_options);
  const auto gold = filtered.signal(gold_label(axis));

  std::vector<PursuitTrial> out;
  for (const auto& t : trials) {
    if (t.axis != axis) continue;
    if (!(t.start < t.end && t.end <= n)) {
      throw DataError("pursuit trial " + std::to_string(t.id) + " lies outside the recording");
    }
    out.push_back({session.subject_id, t.id, slice(filtered, t.start, t.end), slice(gold, t.start, t.end),
                   slice(gaze_axis, t.start, t.end)});
  }
  return out;
}

CorrelationReport rank_montages(const std::vector<PursuitTrial>& trials, const std::vector<Montage>& montages,
                                Axis axis, const RankOptions& options) {
  if (trials.empty()) throw ValidationError("rank_montages: need at least one trial");
  CorrelationReport report;
  report.axis = axis;
  report.aggregation = options.aggregation;
  report.trials = static_cast<int>(trials.size());
  {
    std::set<std::string> ids;
    for (const auto& t : trials) ids.insert(t.subject_id);
    report.subjects.assign(ids.begin(), ids.end());
  }
  std::map<std::string, std::size_t> subject_index;
  for (std::size_t i = 0; i < report.subjects.size(); ++i) subject_index[report.subjects[i]] = i;

  const auto nt = trials.size();
  const auto nm = montages.size();
  std::vector<Signal> gold(nt), gaze(nt);
  std::vector<Signal> diff(nt * nm);
  for (std::size_t t = 0; t < nt; ++t) {
    gold[t] = dsp::preprocess_eog(trials[t].gold, options.mean_window, options.with_detrend);
    gaze[t] = dsp::normalize(dsp::mean_filter(trials[t].gaze, options.mean_window));
    if (gold[t].size() != gaze[t].size()) throw DataError("rank_montages: gold and gaze windows differ in length");
    for (std::size_t m = 0; m < nm; ++m) {
      diff[m * nt + t] = dsp::preprocess_eog(differential_signal(trials[t].recording, montages[m]),
                                             options.mean_window, options.with_detrend);
    }
  }

  // Task 2k is montage-vs-gold, 2k+1 montage-vs-gaze, k = m * nt + t.
  std::vector<kernels::LagTask> tasks;
  tasks.reserve(2 * nt * nm);
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& d = diff[m * nt + t].samples;
      tasks.push_back({d, gold[t].samples, options.max_lag_eog});
      tasks.push_back({d, gaze[t].samples, options.max_lag_cam});
    }
  }
  const auto results = kernels::lagged_correlations(tasks, options.execution);

  for (std::size_t m = 0; m < nm; ++m) {
    MontageScore score;
    score.montage = montages[m];
    double z_eog = 0.0;
    double z_cam = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& re = results[2 * (m * nt + t)];
      const auto& rc = results[2 * (m * nt + t) + 1];
      if (!re || !rc) {
        ++score.excluded_trials;
        continue;
      }
      z_eog += stats::fisher_z(re->r);
      z_cam += stats::fisher_z(rc->r);
    }
    score.polarity_eog = sign_of(z_eog);
    score.polarity_cam = sign_of(z_cam);

    std::vector<std::vector<double>> per_eog(report.subjects.size()), per_cam(report.subjects.size());
    std::vector<double> all_eog, all_cam;
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& re = results[2 * (m * nt + t)];
      const auto& rc = results[2 * (m * nt + t) + 1];
      if (!re || !rc) continue;
      const auto s = subject_index.at(trials[t].subject_id);
      per_eog[s].push_back(score.polarity_eog * re->r);
      per_cam[s].push_back(score.polarity_cam * rc->r);
      all_eog.push_back(per_eog[s].back());
      all_cam.push_back(per_cam[s].back());
    }
    std::vector<double> present_eog, present_cam;
    for (std::size_t s = 0; s < report.subjects.size(); ++s) {
      if (per_eog[s].empty()) {
        score.subject_r_eog.emplace_back();
        score.subject_r_cam.emplace_back();
        continue;
      }
      score.subject_r_eog.emplace_back(stats::fisher_mean(per_eog[s]));
      score.subject_r_cam.emplace_back(stats::fisher_mean(per_cam[s]));
      present_eog.push_back(*score.subject_r_eog.back());
      present_cam.push_back(*score.subject_r_cam.back());
    }
    if (!present_eog.empty()) {
      if (options.aggregation == Aggregation::within_subject) {
        score.mean_r_eog = stats::fisher_mean(present_eog);
        score.mean_r_cam = stats::fisher_mean(present_cam);
      } else {
        score.mean_r_eog = stats::fisher_mean(all_eog);
        score.mean_r_cam = stats::fisher_mean(all_cam);
      }
      score.sd_r_eog = stats::sample_sd(present_eog);
      score.sd_r_cam = stats::sample_sd(present_cam);
    }
    report.excluded_trials += score.excluded_trials;
    report.montages.push_back(std::move(score));
  }
  std::stable_sort(report.montages.begin(), report.montages.end(),
                   [](const MontageScore& a, const MontageScore& b) { return a.mean_r_eog > b.mean_r_eog; });
  return report;
}

namespace {

SignificanceTest test_ground_truth(const CorrelationReport& report, bool use_eog, double alpha,
                                   stats::WilcoxonOptions wilcoxon) {
  const auto nm = report.montages.size();
  std::vector<std::vector<double>> matrix;
  for (std::size_t s = 0; s < report.subjects.size(); ++s) {
    std::vector<double> row;
    for (const auto& score : report.montages) {
      const auto& v = use_eog ? score.subject_r_eog[s] : score.subject_r_cam[s];
      if (!v) break;
      row.push_back(*v);
    }
    if (row.size() == nm) matrix.push_back(std::move(row));
  }
  if (matrix.size() < 5) throw ValidationError("montage_significance: need at least 5 complete subjects");

  SignificanceTest test;
  test.subjects_used = static_cast<int>(matrix.size());
  const auto fr = stats::friedman(matrix);
  test.friedman_statistic = fr.statistic;
  test.friedman_p = fr.p_value;
  if (!(fr.p_value < alpha)) {
    test.posthoc.reason = "Friedman p >= alpha; equal correlations not rejected";
    return test;
  }

  std::vector<double> raw;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < nm; ++i) {
    for (std::size_t j = i + 1; j < nm; ++j) {
      std::vector<double> x, y;
      for (const auto& row : matrix) {
        x.push_back(row[i]);
        y.push_back(row[j]);
      }
      double p = 1.0;
      try {
        p = stats::wilcoxon_signed_rank(x, y, wilcoxon);
      } catch (const Error&) {
        // Too few non-zero differences to test: leave the pair unrejected.
        ++test.posthoc.degenerate_pairs;
      }
      raw.push_back(p);
      pairs.emplace_back(i, j);
    }
  }
  const auto corrected = stats::bonferroni(raw);
  test.posthoc.computed = true;
  test.posthoc.reason = "Friedman p < alpha";
  test.posthoc.p_matrix.assign(nm, std::vector<std::optional<double>>(nm));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    test.posthoc.p_matrix[pairs[k].first][pairs[k].second] = corrected[k];
    test.posthoc.p_matrix[pairs[k].second][pairs[k].first] = corrected[k];
  }
  return test;
}

}  // namespace

CorrelationReport montage_significance(CorrelationReport report, double alpha, stats::WilcoxonOptions wilcoxon) {
  if (report.montages.size() < 2) throw ValidationError("montage_significance: need at least 2 montages");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("montage_significance: alpha must be in (0, 1)");
  report.eog = test_ground_truth(report, true, alpha, wilcoxon);
  report.cam = test_ground_truth(report, false, alpha, wilcoxon);
  return report;
}

std::string format_r(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "r = %.2f", r);
  return buf;
}

}  // namespace eargaze::montage
