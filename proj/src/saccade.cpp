#include "eargaze/saccade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <tuple>

#include "eargaze/dsp.hpp"
#include "eargaze/error.hpp"
#include "eargaze/io.hpp"

namespace eargaze::saccade {

void SegmentationParams::validate() const {
  if (!(velocity_threshold_uv > 0.0)) throw ValidationError("segmentation: velocity threshold must be positive");
  if (!(min_duration_s >= 0.0 && max_duration_s > min_duration_s)) {
    throw ValidationError("segmentation: need 0 <= min_duration < max_duration");
  }
  if (!(search_before_s >= 0.0 && search_after_s > 0.0)) {
    throw ValidationError("segmentation: search window must extend past the onset");
  }
}

namespace {

std::vector<double> central_difference(const std::vector<double>& x) {
  const auto n = x.size();
  std::vector<double> v(n, 0.0);
  if (n < 2) return v;
  v.front() = x[1] - x[0];
  v.back() = x[n - 1] - x[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) v[i] = 0.5 * (x[i + 1] - x[i - 1]);
  return v;
}

std::size_t to_samples(double seconds, double rate) { return static_cast<std::size_t>(std::llround(seconds * rate)); }

SaccadeEvent locate(const std::vector<double>& v, double rate, const synth::SaccadeAnnotation& a,
                    const std::string& subject_id, const SegmentationParams& params) {
  SaccadeEvent ev;
  ev.subject_id = subject_id;
  ev.annotation_id = a.id;
  ev.direction = a.direction;
  ev.target_angle_deg = a.target_angle_deg;
  ev.outward = a.outward;
  const auto n = v.size();
  if (a.onset >= n) {
    ev.start_idx = n > 0 ? n - 1 : 0;
    ev.end_idx = ev.start_idx + 1;
    ev.reason = "annotation outside recording";
    return ev;
  }
  ev.start_idx = a.onset;
  ev.end_idx = a.onset + 1;

  const auto before = to_samples(params.search_before_s, rate);
  const std::size_t lo = a.onset > before ? a.onset - before : 0;
  const std::size_t hi = std::min(n, a.onset + to_samples(params.search_after_s, rate) + 1);
  std::size_t peak = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (std::abs(v[i]) > std::abs(v[peak])) peak = i;
  }
  const double thr = params.velocity_threshold_uv;
  if (std::abs(v[peak]) < thr) {
    ev.reason = "no threshold crossing";
    return ev;
  }
  const double s = v[peak] > 0.0 ? 1.0 : -1.0;
  std::size_t b = peak;
  while (b > lo && s * v[b - 1] >= thr) --b;
  std::size_t e = peak + 1;
  while (e < hi && s * v[e] >= thr) ++e;
  ev.start_idx = b;
  ev.end_idx = e;

  const double duration = static_cast<double>(e - b) / rate;
  const int expected = polarity_of(a.direction) * (a.outward ? 1 : -1);
  if ((b == lo && lo > 0) || (e == hi && hi < n)) {
    ev.reason = "no clear start or end";
  } else if (static_cast<int>(s) != expected) {
    ev.reason = "wrong direction";
  } else if (duration < params.min_duration_s) {
    ev.reason = "too short";
  } else if (duration > params.max_duration_s) {
    ev.reason = "too long";
  } else {
    ev.valid = true;
  }
  return ev;
}

}  // namespace

std::vector<SaccadeEvent> segment_saccades(const Signal& gold, std::span<const synth::SaccadeAnnotation> annotations,
                                           Axis axis, const std::string& subject_id,
                                           const SegmentationParams& params) {
  params.validate();
  if (!(gold.sample_rate > 0.0)) throw ValidationError("segment_saccades: signal has no sample rate");
  const auto v = central_difference(gold.samples);
  std::vector<SaccadeEvent> out;
  for (const auto& a : annotations) {
    if (axis_of(a.direction) != axis) continue;
    out.push_back(locate(v, gold.sample_rate, a, subject_id, params));
  }
  return out;
}

std::vector<SaccadeEvent> segment_session(const Recording& filtered,
                                          std::span<const synth::SaccadeAnnotation> annotations,
                                          const SegmentationParams& params) {
  params.validate();
  const auto vh = central_difference(filtered.channel(kGoldHorizontal));
  const auto vv = central_difference(filtered.channel(kGoldVertical));
  std::vector<SaccadeEvent> out;
  for (const auto& a : annotations) {
    const auto& v = axis_of(a.direction) == Axis::horizontal ? vh : vv;
    out.push_back(locate(v, filtered.sample_rate, a, filtered.subject_id, params));
  }
  return out;
}

std::vector<EventOverride> load_overrides(const std::filesystem::path& path) {
  const auto table = io::read_table(path);
  const std::vector<std::string> expected{"subject_id", "annotation_id", "start_idx", "end_idx", "valid"};
  if (table.header != expected) {
    throw io::FormatError(io::FormatIssue::malformed_row, path.string() + ": unexpected override header");
  }
  std::vector<EventOverride> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path.string() + " row " + std::to_string(r + 2);
    if (row.size() != expected.size()) throw io::FormatError(io::FormatIssue::malformed_row, where + ": field count");
    EventOverride o;
    o.subject_id = row[0];
    try {
      o.annotation_id = std::stoi(row[1]);
      o.start_idx = std::stoul(row[2]);
      o.end_idx = std::stoul(row[3]);
    } catch (const std::exception&) {
      throw io::FormatError(io::FormatIssue::malformed_row, where + ": bad integer");
    }
    if (row[4] == "1" || row[4] == "true") {
      o.valid = true;
    } else if (row[4] == "0" || row[4] == "false") {
      o.valid = false;
    } else {
      throw io::FormatError(io::FormatIssue::malformed_row, where + ": valid must be 0/1");
    }
    if (o.start_idx >= o.end_idx) throw io::FormatError(io::FormatIssue::malformed_row, where + ": start >= end");
    out.push_back(std::move(o));
  }
  return out;
}

void write_overrides(std::span<const EventOverride> overrides, const std::filesystem::path& path) {
  io::Table table;
  table.header = {"subject_id", "annotation_id", "start_idx", "end_idx", "valid"};
  for (const auto& o : overrides) {
    table.rows.push_back({o.subject_id, std::to_string(o.annotation_id), std::to_string(o.start_idx),
                          std::to_string(o.end_idx), o.valid ? "1" : "0"});
  }
  io::write_table(path, table);
}

void apply_overrides(std::vector<SaccadeEvent>& events, std::span<const EventOverride> overrides) {
  for (const auto& o : overrides) {
    auto it = std::find_if(events.begin(), events.end(), [&](const SaccadeEvent& e) {
      return e.subject_id == o.subject_id && e.annotation_id == o.annotation_id;
    });
    if (it == events.end()) {
      throw DataError("override for " + o.subject_id + "/" + std::to_string(o.annotation_id) +
                      " matches no event");
    }
    it->start_idx = o.start_idx;
    it->end_idx = o.end_idx;
    it->valid = o.valid;
    it->reason = o.valid ? "" : "manual override";
  }
}

WindowSpan event_window(const SaccadeEvent& event, std::size_t signal_length, double sample_rate,
                        double context_s) {
  if (event.end_idx > signal_length || event.start_idx >= event.end_idx) {
    throw DataError("saccade event lies outside the signal");
  }
  const auto ctx = to_samples(context_s, sample_rate);
  return {event.start_idx > ctx ? event.start_idx - ctx : 0, std::min(signal_length, event.end_idx + ctx)};
}

std::vector<WaveformCell> average_saccade_waveform(std::span<const SaccadeEvent> events, const Signal& signal,
                                                   const WaveformParams& params) {
  const EventSource source{events, &signal};
  return average_saccade_waveform(std::span<const EventSource>(&source, 1), params);
}

std::vector<WaveformCell> average_saccade_waveform(std::span<const EventSource> sources,
                                                   const WaveformParams& params) {
  if (params.resample_len < 2) throw ValidationError("average_saccade_waveform: resample_len must be >= 2");
  std::map<std::pair<Direction, double>, std::vector<std::vector<double>>> cells;
  for (const auto& src : sources) {
    const auto& signal = *src.signal;
    for (const auto& ev : src.events) {
      if (!ev.valid || !ev.outward) continue;
      const auto w = event_window(ev, signal.size(), signal.sample_rate, params.context_s);
      std::span<const double> win(signal.samples.data() + w.begin, w.end - w.begin);
      const auto pre = ev.start_idx - w.begin;
      double baseline = win.front();
      if (pre > 0) baseline = stats::mean(win.first(pre));
      std::vector<double> shifted(win.begin(), win.end());
      for (auto& s : shifted) s -= baseline;
      cells[{ev.direction, ev.target_angle_deg}].push_back(dsp::resample_linear(shifted, params.resample_len));
    }
  }
  std::vector<WaveformCell> out;
  for (const auto& [key, waves] : cells) {
    WaveformCell cell;
    cell.direction = key.first;
    cell.target_angle_deg = key.second;
    cell.count = static_cast<int>(waves.size());
    cell.mean.resize(params.resample_len);
    cell.sd.resize(params.resample_len);
    std::vector<double> column(waves.size());
    for (std::size_t k = 0; k < params.resample_len; ++k) {
      for (std::size_t j = 0; j < waves.size(); ++j) column[j] = waves[j][k];
      cell.mean[k] = stats::mean(column);
      cell.sd[k] = stats::sample_sd(column);
    }
    out.push_back(std::move(cell));
  }
  return out;
}

double voltage_deflection(std::span<const double> window, DeflectionSign sign) {
  if (window.size() < 20) throw ValidationError("voltage_deflection: window needs at least 20 samples");
  const double first = stats::mean(window.first(10));
  const double last = stats::mean(window.last(10));
  return sign == DeflectionSign::first_minus_last ? first - last : last - first;
}

std::vector<DeflectionSample> extract_deflections(std::span<const SaccadeEvent> events, const Signal& signal,
                                                  const Signal& gaze, const DeflectionParams& params) {
  if (signal.size() != gaze.size()) throw ValidationError("extract_deflections: signal and gaze lengths differ");
  if (params.resample_len < 20) throw ValidationError("extract_deflections: resample_len must be >= 20");
  std::vector<DeflectionSample> out;
  for (const auto& ev : events) {
    if (!ev.valid || (!ev.outward && !params.include_returns)) continue;
    const auto w = event_window(ev, signal.size(), signal.sample_rate, params.context_s);
    std::span<const double> win(signal.samples.data() + w.begin, w.end - w.begin);
    const auto resampled = dsp::resample_linear(win, params.resample_len);
    out.push_back({ev.subject_id, ev.direction, ev.target_angle_deg,
                   gaze.samples[w.end - 1] - gaze.samples[w.begin], voltage_deflection(resampled, params.sign)});
  }
  return out;
}

namespace {

std::map<double, double> per_angle_means(std::span<const DeflectionSample> samples, Direction direction) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& s : samples) {
    if (s.direction != direction) continue;
    auto& slot = acc[s.target_angle_deg];
    slot.first += s.deflection;
    ++slot.second;
  }
  std::map<double, double> out;
  for (const auto& [angle, sum] : acc) out[angle] = sum.first / sum.second;
  return out;
}

stats::CorrelationResult correlate(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) throw ValidationError("deflection correlation needs at least three angles");
  stats::CorrelationResult res;
  res.r = stats::pearson(x, y);
  res.p_value = stats::pearson_p_value(res.r, x.size());
  return res;
}

}  // namespace

stats::CorrelationResult deflection_linearity(std::span<const DeflectionSample> samples, Direction direction) {
  std::vector<double> x, y;
  for (const auto& [angle, m] : per_angle_means(samples, direction)) {
    x.push_back(polarity_of(direction) * angle);
    y.push_back(m);
  }
  return correlate(x, y);
}

stats::CorrelationResult deflection_agreement(std::span<const DeflectionSample> a,
                                              std::span<const DeflectionSample> b, Direction direction) {
  const auto ma = per_angle_means(a, direction);
  const auto mb = per_angle_means(b, direction);
  std::vector<double> x, y;
  for (const auto& [angle, m] : ma) {
    auto it = mb.find(angle);
    if (it == mb.end()) continue;
    x.push_back(m);
    y.push_back(it->second);
  }
  return correlate(x, y);
}

RegressionModel fit_angle_regressor(std::span<const DeflectionSample> samples) {
  if (samples.size() < 2) throw DegenerateError("fit_angle_regressor: need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (const auto& s : samples) {
    mx += s.deflection;
    my += s.true_angle_change;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  bool distinct = false;
  for (const auto& s : samples) {
    const double dx = s.deflection - mx;
    sxx += dx * dx;
    sxy += dx * (s.true_angle_change - my);
    distinct = distinct || s.deflection != samples.front().deflection;
  }
  if (!distinct || !(sxx > 0.0)) throw DegenerateError("fit_angle_regressor: deflections are all equal");
  RegressionModel m;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  if (!std::isfinite(m.slope) || !std::isfinite(m.intercept)) {
    throw DegenerateError("fit_angle_regressor: non-finite fit");
  }
  return m;
}

namespace {

void predict_fold(std::span<const DeflectionSample> samples, const std::string& held_out, ModelScope scope,
                  std::vector<double>& predictions) {
  std::vector<DeflectionSample> train;
  for (const auto& s : samples) {
    if (s.subject_id != held_out) train.push_back(s);
  }
  if (scope == ModelScope::per_axis) {
    const auto model = fit_angle_regressor(train);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].subject_id == held_out) predictions[i] = model.predict(samples[i].deflection);
    }
    return;
  }
  std::map<Direction, RegressionModel> models;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].subject_id != held_out) continue;
    const auto d = samples[i].direction;
    if (!models.contains(d)) {
      std::vector<DeflectionSample> sub;
      for (const auto& s : train) {
        if (s.direction == d) sub.push_back(s);
      }
      models[d] = fit_angle_regressor(sub);
    }
    predictions[i] = models[d].predict(samples[i].deflection);
  }
}

}  // namespace

std::vector<double> loso_predict(std::span<const DeflectionSample> samples, const LosoOptions& options) {
  std::vector<std::string> subjects;
  {
    std::set<std::string> ids;
    for (const auto& s : samples) ids.insert(s.subject_id);
    subjects.assign(ids.begin(), ids.end());
  }
  if (subjects.size() < 2) throw ValidationError("loso: need at least two subjects");
  std::vector<double> predictions(samples.size(), 0.0);
  const auto folds = static_cast<std::ptrdiff_t>(subjects.size());
  if (options.execution == kernels::Execution::serial) {
    for (std::ptrdiff_t f = 0; f < folds; ++f) predict_fold(samples, subjects[f], options.scope, predictions);
    return predictions;
  }
  // Folds write disjoint prediction slots.
  std::vector<std::exception_ptr> errors(subjects.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t f = 0; f < folds; ++f) {
    try {
      predict_fold(samples, subjects[f], options.scope, predictions);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return predictions;
}

namespace {

MaeRow summarise(std::optional<Direction> d, std::optional<double> angle, const std::vector<double>& errors) {
  return {d, angle, static_cast<int>(errors.size()), stats::mean(errors), stats::sample_sd(errors)};
}

}  // namespace

MaeTable loso_evaluate(std::span<const DeflectionSample> samples, Axis axis, const LosoOptions& options) {
  for (const auto& s : samples) {
    if (axis_of(s.direction) != axis) throw ValidationError("loso_evaluate: sample direction does not match axis");
  }
  MaeTable table;
  table.axis = axis;
  table.recommended = axis == Axis::horizontal;
  table.predictions = loso_predict(samples, options);
  std::map<std::pair<Direction, double>, std::vector<double>> cells;
  std::map<Direction, std::vector<double>> directions;
  std::vector<double> all;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double err = std::abs(table.predictions[i] - samples[i].true_angle_change);
    cells[{samples[i].direction, samples[i].target_angle_deg}].push_back(err);
    directions[samples[i].direction].push_back(err);
    all.push_back(err);
  }
  for (const auto& [key, errs] : cells) table.rows.push_back(summarise(key.first, key.second, errs));
  for (const auto& [d, errs] : directions) table.rows.push_back(summarise(d, std::nullopt, errs));
  table.rows.push_back(summarise(std::nullopt, std::nullopt, all));
  return table;
}

std::string format_mae(double mae, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f° ± %.2f°", mae, sd);
  return buf;
}

std::string format_deflection(double uv) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f µV", uv);
  return buf;
}

BlandAltmanSummary bland_altman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("bland_altman: length mismatch");
  if (a.size() < 2) throw ValidationError("bland_altman: need at least two pairs");
  BlandAltmanSummary out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.differences.push_back(a[i] - b[i]);
    out.means.push_back(0.5 * (a[i] + b[i]));
  }
  out.mean_difference = stats::mean(out.differences);
  out.sd_difference = stats::sample_sd(out.differences);
  out.loa_low = out.mean_difference - 1.96 * out.sd_difference;
  out.loa_high = out.mean_difference + 1.96 * out.sd_difference;
  return out;
}

}  // namespace eargaze::saccade
