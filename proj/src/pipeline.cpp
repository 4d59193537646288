#include "eargaze/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>

#include "eargaze/dsp.hpp"
#include "eargaze/error.hpp"
#include "eargaze/io.hpp"

namespace eargaze::pipeline {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kPursuitH = "pursuit_horizontal";
constexpr const char* kPursuitV = "pursuit_vertical";
constexpr const char* kSaccade = "saccade";

std::string subject_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%02d", index + 1);
  return buf;
}

synth::SimulationOptions simulation_options(const config::PipelineConfig& c, const std::string& id,
                                            const std::string& tag) {
  synth::SimulationOptions o;
  o.subject_id = id;
  o.task_tag = tag;
  o.gaze_rate_hz = c.synthetic.gaze.rate_hz;
  o.gaze_missing_fraction = c.synthetic.gaze.missing_fraction;
  o.gaze_delay_s = c.synthetic.gaze.delay_s;
  o.gaze_jitter_s = c.synthetic.gaze.jitter_s;
  o.adc_resolution_uv = c.synthetic.adc_resolution_uv;
  o.execution = c.execution;
  return o;
}

fs::path with_suffix(const fs::path& dir, const std::string& stem, const std::string& suffix) {
  return dir / (stem + suffix);
}

Signal gaze_on_grid(const GazeLog& log, const Recording& rec, Axis axis, dsp::Interpolation method) {
  dsp::ResampleOptions ro;
  ro.origin_s = 0.0;
  ro.end_s = static_cast<double>(rec.length() - 1) / rec.sample_rate;
  ro.method = method;
  auto s = dsp::fill_and_resample(log, rec.sample_rate, ro).component(axis);
  s.samples.resize(rec.length(), s.samples.empty() ? 0.0 : s.samples.back());
  return s;
}

std::string pick_montage(const std::string& wanted, const montage::CorrelationReport& report,
                         const ElectrodeLayout& layout) {
  if (wanted != "top") {
    const auto m = montage::parse_montage(wanted, report.axis);
    if (!layout.contains(m.a) || !layout.contains(m.b)) {
      throw ValidationError("montage '" + wanted + "' uses electrodes missing from the layout");
    }
    return wanted;
  }
  if (report.montages.empty()) throw DataError("no " + std::string(to_string(report.axis)) + " montages to pick from");
  return report.montages.front().montage.name();
}

json try_correlation(const std::function<stats::CorrelationResult()>& f) {
  try {
    return report::to_json(f());
  } catch (const Error& e) {
    return {{"r", nullptr}, {"error", e.what()}};
  }
}

}  // namespace

Command parse_command(std::string_view text) {
  if (text == "synth") return Command::synth;
  if (text == "preprocess") return Command::preprocess;
  if (text == "montages") return Command::montages;
  if (text == "saccades") return Command::saccades;
  if (text == "regress") return Command::regress;
  if (text == "pipeline") return Command::pipeline;
  throw ValidationError("unknown command '" + std::string(text) + "'");
}

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::synth: return "synth";
    case Command::preprocess: return "preprocess";
    case Command::montages: return "montages";
    case Command::saccades: return "saccades";
    case Command::regress: return "regress";
    case Command::pipeline: return "pipeline";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  // splitmix64 finaliser over a mixed key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream * 0x10001ULL + index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Dataset synthesize(const config::PipelineConfig& c) {
  const auto model = synth::default_head_model();
  Dataset ds;
  ds.layout = model.layout;
  ds.screen = ScreenGeometry::lab_default();
  if (!c.paths.screen.empty()) ds.screen = io::load_screen(c.paths.screen);
  for (int i = 0; i < c.synthetic.subjects; ++i) {
    SubjectData subject;
    subject.id = subject_name(i);
    auto noise = c.synthetic.noise;

    auto make_pursuit = [&](Axis axis, std::uint64_t stream, const char* tag) {
      auto params = c.protocol.pursuit;
      params.axis = axis;
      params.sample_rate_hz = c.protocol.sample_rate_hz;
      const auto traj = synth::pursuit_session(params, derive_seed(c.seed, stream, i));
      noise.seed = derive_seed(c.seed, stream + 1, i);
      auto sim = synth::simulate_recording(model, traj, noise, simulation_options(c, subject.id, tag));
      return PursuitSession{std::move(sim.recording), std::move(sim.gaze_log), traj.trials};
    };
    subject.pursuit_horizontal = make_pursuit(Axis::horizontal, 10, kPursuitH);
    subject.pursuit_vertical = make_pursuit(Axis::vertical, 20, kPursuitV);

    auto sp = c.protocol.saccade;
    sp.sample_rate_hz = c.protocol.sample_rate_hz;
    const auto traj = synth::saccade_protocol(sp);
    noise.seed = derive_seed(c.seed, 31, i);
    auto sim = synth::simulate_recording(model, traj, noise, simulation_options(c, subject.id, kSaccade));
    subject.saccade = {std::move(sim.recording), std::move(sim.gaze_log), traj.saccades};
    ds.subjects.push_back(std::move(subject));
  }
  return ds;
}

std::vector<fs::path> write_dataset(const Dataset& ds, const fs::path& dir) {
  std::vector<fs::path> files;
  fs::create_directories(dir);
  io::write_layout(ds.layout, dir / "layout.json");
  io::write_screen(ds.screen, dir / "screen.json");
  files.push_back(dir / "layout.json");
  files.push_back(dir / "screen.json");
  for (const auto& s : ds.subjects) {
    const auto sub = dir / s.id;
    fs::create_directories(sub);
    auto write_session = [&](const std::string& stem, const Recording& rec, const GazeLog& gaze) {
      io::write_recording(rec, with_suffix(sub, stem, ".csv"));
      io::write_gaze_log(gaze, with_suffix(sub, stem, ".gaze.csv"), ds.screen);
      for (const char* suffix : {".csv", ".meta.json", ".gaze.csv", ".gaze.meta.json"}) {
        files.push_back(with_suffix(sub, stem, suffix));
      }
    };
    write_session(kPursuitH, s.pursuit_horizontal.recording, s.pursuit_horizontal.gaze);
    report::write_pursuit_annotations(s.pursuit_horizontal.trials, with_suffix(sub, kPursuitH, ".annotations.csv"));
    write_session(kPursuitV, s.pursuit_vertical.recording, s.pursuit_vertical.gaze);
    report::write_pursuit_annotations(s.pursuit_vertical.trials, with_suffix(sub, kPursuitV, ".annotations.csv"));
    write_session(kSaccade, s.saccade.recording, s.saccade.gaze);
    report::write_saccade_annotations(s.saccade.saccades, with_suffix(sub, kSaccade, ".annotations.csv"));
    for (const char* stem : {kPursuitH, kPursuitV, kSaccade}) files.push_back(with_suffix(sub, stem, ".annotations.csv"));
  }
  return files;
}

Dataset load_dataset(const fs::path& dir, const config::PipelineConfig& c) {
  if (!fs::is_directory(dir)) throw DataError("data directory '" + dir.string() + "' does not exist");
  Dataset ds;
  ds.layout = io::load_layout(c.paths.layout.empty() ? dir / "layout.json" : fs::path(c.paths.layout));
  const fs::path screen = c.paths.screen.empty() ? dir / "screen.json" : fs::path(c.paths.screen);
  ds.screen = fs::exists(screen) ? io::load_screen(screen) : ScreenGeometry::lab_default();
  std::vector<fs::path> subject_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subject_dirs.push_back(entry.path());
  }
  std::sort(subject_dirs.begin(), subject_dirs.end());
  if (subject_dirs.empty()) throw DataError("data directory '" + dir.string() + "' holds no subjects");
  for (const auto& sub : subject_dirs) {
    SubjectData s;
    s.id = sub.filename().string();
    auto load_pursuit = [&](const char* stem) {
      PursuitSession p;
      p.recording = io::load_recording(with_suffix(sub, stem, ".csv"), ds.layout);
      p.gaze = io::load_gaze_log(with_suffix(sub, stem, ".gaze.csv"), ds.screen);
      p.trials = report::load_pursuit_annotations(with_suffix(sub, stem, ".annotations.csv"));
      return p;
    };
    s.pursuit_horizontal = load_pursuit(kPursuitH);
    s.pursuit_vertical = load_pursuit(kPursuitV);
    s.saccade.recording = io::load_recording(with_suffix(sub, kSaccade, ".csv"), ds.layout);
    s.saccade.gaze = io::load_gaze_log(with_suffix(sub, kSaccade, ".gaze.csv"), ds.screen);
    s.saccade.saccades = report::load_saccade_annotations(with_suffix(sub, kSaccade, ".annotations.csv"));
    for (const auto* rec : {&s.pursuit_horizontal.recording, &s.pursuit_vertical.recording, &s.saccade.recording}) {
      if (rec->subject_id != s.id) {
        throw DataError(sub.string() + ": recording subject '" + rec->subject_id + "' does not match folder");
      }
      if (!rec->has_channel(kGoldHorizontal) || !rec->has_channel(kGoldVertical)) {
        throw DataError(sub.string() + ": recordings need hEOG and vEOG channels");
      }
    }
    ds.subjects.push_back(std::move(s));
  }
  return ds;
}

Dataset filter_dataset(const Dataset& ds, const config::PipelineConfig& c) {
  Dataset out = ds;
  std::vector<std::vector<double>*> channels;
  for (auto& s : out.subjects) {
    for (auto* rec : {&s.pursuit_horizontal.recording, &s.pursuit_vertical.recording, &s.saccade.recording}) {
      if (rec->sample_rate != c.preprocess.filter.sample_rate_hz) {
        throw DataError(s.id + ": recording rate does not match the configured sample rate");
      }
      for (auto& ch : rec->channels) channels.push_back(&ch);
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(channels.size());
  std::vector<std::exception_ptr> errors(channels.size());
  const double fs_hz = c.preprocess.filter.sample_rate_hz;
#pragma omp parallel for schedule(dynamic, 1) if (c.execution == kernels::Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      *channels[i] = dsp::bandpass_filter(Signal{*channels[i], fs_hz}, c.preprocess.filter, c.preprocess.options).samples;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

MontageResults analyse_montages(const Dataset& filtered, const config::PipelineConfig& c) {
  MontageResults out;
  montage::TrialPreparation prep;
  prep.filter = c.preprocess.filter;
  prep.filter_options = c.preprocess.options;
  prep.gaze_interpolation = c.montage.gaze_interpolation;
  prep.recording_prefiltered = true;
  stats::WilcoxonOptions wilcoxon;
  wilcoxon.exact_max_n = c.montage.wilcoxon_exact_max_n;
  for (Axis axis : {Axis::horizontal, Axis::vertical}) {
    const auto montages = montage::classify_montages(filtered.layout, axis, c.montage.tolerance_deg);
    if (montages.empty()) throw DataError("layout has no " + std::string(to_string(axis)) + " montages");
    std::vector<montage::PursuitTrial> trials;
    for (const auto& s : filtered.subjects) {
      const auto& session = axis == Axis::horizontal ? s.pursuit_horizontal : s.pursuit_vertical;
      auto t = montage::prepare_pursuit_trials(session.recording, session.gaze, session.trials, axis, prep);
      std::move(t.begin(), t.end(), std::back_inserter(trials));
    }
    auto rank = c.montage.rank;
    rank.execution = c.execution;
    auto report = montage::rank_montages(trials, montages, axis, rank);
    if (report.subjects.size() >= 5 && montages.size() >= 2) {
      report = montage::montage_significance(std::move(report), c.montage.alpha, wilcoxon);
    }
    (axis == Axis::horizontal ? out.horizontal : out.vertical) = std::move(report);
  }
  return out;
}

SaccadeResults analyse_saccades(const Dataset& filtered, const config::PipelineConfig& c,
                                const MontageResults& montages) {
  SaccadeResults out;
  out.montage_horizontal = pick_montage(c.saccade.montage_horizontal, montages.horizontal, filtered.layout);
  out.montage_vertical = pick_montage(c.saccade.montage_vertical, montages.vertical, filtered.layout);

  std::vector<saccade::EventOverride> overrides;
  if (!c.paths.overrides_csv.empty()) overrides = saccade::load_overrides(c.paths.overrides_csv);

  struct PerSubject {
    std::vector<saccade::SaccadeEvent> events;
  };
  std::vector<PerSubject> per(filtered.subjects.size());
  for (std::size_t i = 0; i < filtered.subjects.size(); ++i) {
    const auto& s = filtered.subjects[i];
    per[i].events = saccade::segment_session(s.saccade.recording, s.saccade.saccades, c.saccade.segmentation);
    std::vector<saccade::EventOverride> mine;
    for (const auto& o : overrides) {
      if (o.subject_id == s.id) mine.push_back(o);
    }
    saccade::apply_overrides(per[i].events, mine);
    out.events.insert(out.events.end(), per[i].events.begin(), per[i].events.end());
  }

  json axes = json::object();
  for (Axis axis : {Axis::horizontal, Axis::vertical}) {
    const auto& name = axis == Axis::horizontal ? out.montage_horizontal : out.montage_vertical;
    const auto m = montage::parse_montage(name, axis);
    const std::string gold(gold_label(axis));
    std::vector<saccade::DeflectionSample> ear_all, gold_all;
    std::vector<Signal> ear_signals, gold_signals;
    std::vector<std::vector<saccade::SaccadeEvent>> axis_events;
    for (std::size_t i = 0; i < filtered.subjects.size(); ++i) {
      const auto& s = filtered.subjects[i];
      std::vector<saccade::SaccadeEvent> events;
      for (const auto& e : per[i].events) {
        if (axis_of(e.direction) == axis) events.push_back(e);
      }
      const auto gaze = gaze_on_grid(s.saccade.gaze, s.saccade.recording, axis, c.montage.gaze_interpolation);
      ear_signals.push_back(montage::differential_signal(s.saccade.recording, m));
      gold_signals.push_back(s.saccade.recording.signal(gold));
      auto ear = saccade::extract_deflections(events, ear_signals.back(), gaze, c.saccade.deflection);
      auto gd = saccade::extract_deflections(events, gold_signals.back(), gaze, c.saccade.deflection);
      for (auto& d : ear) out.deflections.push_back({"earEOG", name, d});
      for (auto& d : gd) out.deflections.push_back({"gold", gold, d});
      std::move(ear.begin(), ear.end(), std::back_inserter(ear_all));
      std::move(gd.begin(), gd.end(), std::back_inserter(gold_all));
      axis_events.push_back(std::move(events));
    }

    saccade::WaveformParams wp;
    wp.resample_len = c.saccade.deflection.resample_len;
    std::vector<saccade::EventSource> ear_src, gold_src;
    for (std::size_t i = 0; i < axis_events.size(); ++i) {
      ear_src.push_back({axis_events[i], &ear_signals[i]});
      gold_src.push_back({axis_events[i], &gold_signals[i]});
    }
    for (auto& cell : saccade::average_saccade_waveform(ear_src, wp)) out.waveforms.push_back({"earEOG", name, cell});
    for (auto& cell : saccade::average_saccade_waveform(gold_src, wp)) out.waveforms.push_back({"gold", gold, cell});

    json directions = json::object();
    json cells = json::array();
    for (auto d : c.protocol.saccade.directions) {
      if (axis_of(d) != axis) continue;
      directions[std::string(to_string(d))] = {
          {"linearity_earEOG", try_correlation([&] { return saccade::deflection_linearity(ear_all, d); })},
          {"linearity_gold", try_correlation([&] { return saccade::deflection_linearity(gold_all, d); })},
          {"agreement", try_correlation([&] { return saccade::deflection_agreement(ear_all, gold_all, d); })}};
      for (double angle : c.protocol.saccade.angles_deg) {
        std::vector<double> ev, gv;
        for (const auto& x : ear_all) {
          if (x.direction == d && x.target_angle_deg == angle) ev.push_back(x.deflection);
        }
        for (const auto& x : gold_all) {
          if (x.direction == d && x.target_angle_deg == angle) gv.push_back(x.deflection);
        }
        if (ev.empty()) continue;
        cells.push_back({{"direction", to_string(d)},
                         {"target_angle_deg", angle},
                         {"count", ev.size()},
                         {"mean_earEOG_uv", stats::mean(ev)},
                         {"sd_earEOG_uv", stats::sample_sd(ev)},
                         {"mean_gold_uv", stats::mean(gv)},
                         {"label", saccade::format_deflection(stats::mean(ev))}});
      }
    }
    axes[std::string(to_string(axis))] = {{"montage", name},
                                          {"gold_channel", gold},
                                          {"recommended", axis == Axis::horizontal},
                                          {"directions", directions},
                                          {"cells", cells}};
  }
  int valid = 0;
  for (const auto& e : out.events) valid += e.valid ? 1 : 0;
  out.summary = {{"events", out.events.size()},
                 {"valid_events", valid},
                 {"deflection_sign", c.saccade.deflection.sign == saccade::DeflectionSign::first_minus_last
                                         ? "first_minus_last"
                                         : "last_minus_first"},
                 {"context_s", c.saccade.deflection.context_s},
                 {"axes", axes}};
  return out;
}

RegressionResults regress(const SaccadeResults& sr, const config::PipelineConfig& c) {
  saccade::LosoOptions lo;
  lo.scope = c.saccade.model_scope;
  lo.execution = c.execution;
  auto select = [&](const char* source, Axis axis) {
    std::vector<saccade::DeflectionSample> v;
    for (const auto& d : sr.deflections) {
      if (d.source == source && axis_of(d.sample.direction) == axis) v.push_back(d.sample);
    }
    return v;
  };
  RegressionResults out;
  out.horizontal_ear = saccade::loso_evaluate(select("earEOG", Axis::horizontal), Axis::horizontal, lo);
  out.horizontal_gold = saccade::loso_evaluate(select("gold", Axis::horizontal), Axis::horizontal, lo);
  out.vertical_ear = saccade::loso_evaluate(select("earEOG", Axis::vertical), Axis::vertical, lo);
  out.vertical_gold = saccade::loso_evaluate(select("gold", Axis::vertical), Axis::vertical, lo);
  out.bland_altman = saccade::bland_altman(out.horizontal_ear.predictions, out.horizontal_gold.predictions);
  return out;
}

namespace {

class Writer {
 public:
  explicit Writer(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  fs::path path(const std::string& rel) const { return root_ / rel; }
  void add(const fs::path& absolute) { files_.push_back(fs::relative(absolute, root_).generic_string()); }
  void json_file(const std::string& rel, const json& value) {
    io::write_json(path(rel), value);
    add(path(rel));
  }
  const fs::path& root() const { return root_; }

  std::vector<std::string> finish(Command command, const config::PipelineConfig& c) {
    std::sort(files_.begin(), files_.end());
    files_.erase(std::unique(files_.begin(), files_.end()), files_.end());
    json listing = json::array();
    for (const auto& f : files_) {
      std::ifstream in(path(f), std::ios::binary);
      const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      listing.push_back({{"path", f}, {"bytes", bytes.size()}, {"fnv1a64", config::hex64(config::fnv1a64(bytes))}});
    }
    io::write_json(path("manifest.json"), {{"tool", "eargaze"},
                                           {"version", kVersion},
                                           {"command", to_string(command)},
                                           {"seed", c.seed},
                                           {"config_hash", config::config_hash(c)},
                                           {"config", config::to_json(c)},
                                           {"files", listing}});
    auto out = files_;
    out.push_back("manifest.json");
    return out;
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

void write_montage_outputs(Writer& w, const MontageResults& m) {
  w.json_file("correlation_report.json",
              {{"horizontal", report::to_json(m.horizontal)}, {"vertical", report::to_json(m.vertical)}});
  report::write_montage_plot(m.horizontal, w.path("montage_plot_horizontal.csv"));
  report::write_montage_plot(m.vertical, w.path("montage_plot_vertical.csv"));
  w.add(w.path("montage_plot_horizontal.csv"));
  w.add(w.path("montage_plot_vertical.csv"));
}

void write_saccade_outputs(Writer& w, const SaccadeResults& s) {
  report::write_events(s.events, w.path("saccade_events.csv"));
  report::write_deflections(s.deflections, w.path("deflections.csv"));
  report::write_waveforms(s.waveforms, w.path("saccade_waveforms.csv"));
  for (const char* f : {"saccade_events.csv", "deflections.csv", "saccade_waveforms.csv"}) w.add(w.path(f));
  w.json_file("deflection_summary.json", s.summary);
}

void write_regression_outputs(Writer& w, const SaccadeResults& s, const RegressionResults& r) {
  auto pair = [](const std::string& ear_name, const std::string& gold_name, const saccade::MaeTable& ear,
                 const saccade::MaeTable& gold) {
    return json{{"axis", to_string(ear.axis)},
                {"recommended", ear.recommended},
                {"earEOG", {{"channel", ear_name}, {"table", report::to_json(ear)}}},
                {"gold", {{"channel", gold_name}, {"table", report::to_json(gold)}}},
                {"total_earEOG", saccade::format_mae(ear.total().mae, ear.total().sd)},
                {"total_gold", saccade::format_mae(gold.total().mae, gold.total().sd)}};
  };
  w.json_file("mae_table.json",
              pair(s.montage_horizontal, std::string(kGoldHorizontal), r.horizontal_ear, r.horizontal_gold));
  w.json_file("mae_table_vertical.json",
              pair(s.montage_vertical, std::string(kGoldVertical), r.vertical_ear, r.vertical_gold));
  w.json_file("bland_altman.json", {{"a", "earEOG"}, {"b", "gold"}, {"summary", report::to_json(r.bland_altman)}});

  io::Table t;
  t.header = {"subject_id", "direction", "target_angle_deg", "true_angle_change_deg", "predicted_earEOG_deg",
              "predicted_gold_deg"};
  std::size_t k = 0;
  for (const auto& d : s.deflections) {
    if (d.source != "earEOG" || axis_of(d.sample.direction) != Axis::horizontal) continue;
    t.rows.push_back({d.sample.subject_id, std::string(to_string(d.sample.direction)),
                      io::format_double(d.sample.target_angle_deg), io::format_double(d.sample.true_angle_change),
                      io::format_double(r.horizontal_ear.predictions[k]),
                      io::format_double(r.horizontal_gold.predictions[k])});
    ++k;
  }
  io::write_table(w.path("predictions.csv"), t);
  w.add(w.path("predictions.csv"));
}

json preprocess_summary(const Dataset& filtered, const config::PipelineConfig& c) {
  json sections = json::array();
  for (const auto& q : dsp::design_butterworth_bandpass(c.preprocess.filter).sections) {
    sections.push_back({q.b0, q.b1, q.b2, 1.0, q.a1, q.a2});
  }
  json sessions = json::array();
  for (const auto& s : filtered.subjects) {
    for (const auto* rec : {&s.pursuit_horizontal.recording, &s.pursuit_vertical.recording, &s.saccade.recording}) {
      sessions.push_back({{"subject_id", s.id},
                          {"task", rec->task_tag},
                          {"samples", rec->length()},
                          {"channels", rec->labels}});
    }
  }
  return {{"filter",
           {{"low_cut_hz", c.preprocess.filter.low_cut_hz},
            {"high_cut_hz", c.preprocess.filter.high_cut_hz},
            {"order", c.preprocess.filter.order},
            {"sample_rate_hz", c.preprocess.filter.sample_rate_hz},
            {"sos", sections}}},
          {"sessions", sessions}};
}

void write_filtered(Writer& w, const Dataset& filtered) {
  for (const auto& s : filtered.subjects) {
    const auto dir = w.path("preprocessed") / s.id;
    fs::create_directories(dir);
    for (const auto* rec : {&s.pursuit_horizontal.recording, &s.pursuit_vertical.recording, &s.saccade.recording}) {
      const auto file = dir / (rec->task_tag + ".csv");
      io::write_recording(*rec, file);
      w.add(file);
      w.add(io::metadata_path(file));
    }
  }
}

Dataset input_dataset(const config::PipelineConfig& c) {
  return c.paths.data_dir.empty() ? synthesize(c) : load_dataset(c.paths.data_dir, c);
}

}  // namespace

std::vector<std::string> run(Command command, const config::PipelineConfig& c) {
  c.validate();
  c.check_paths();
  Writer w(c.paths.output_dir);
  switch (command) {
    case Command::synth: {
      for (const auto& f : write_dataset(synthesize(c), w.path("data"))) w.add(f);
      break;
    }
    case Command::preprocess: {
      const auto filtered = filter_dataset(input_dataset(c), c);
      write_filtered(w, filtered);
      w.json_file("preprocess_summary.json", preprocess_summary(filtered, c));
      break;
    }
    case Command::montages: {
      write_montage_outputs(w, analyse_montages(filter_dataset(input_dataset(c), c), c));
      break;
    }
    case Command::saccades: {
      const auto filtered = filter_dataset(input_dataset(c), c);
      write_saccade_outputs(w, analyse_saccades(filtered, c, analyse_montages(filtered, c)));
      break;
    }
    case Command::regress: {
      const auto filtered = filter_dataset(input_dataset(c), c);
      const auto sr = analyse_saccades(filtered, c, analyse_montages(filtered, c));
      write_regression_outputs(w, sr, regress(sr, c));
      break;
    }
    case Command::pipeline: {
      Dataset raw;
      if (c.paths.data_dir.empty()) {
        for (const auto& f : write_dataset(synthesize(c), w.path("data"))) w.add(f);
        raw = load_dataset(w.path("data"), c);
      } else {
        raw = load_dataset(c.paths.data_dir, c);
      }
      const auto filtered = filter_dataset(raw, c);
      if (c.preprocess.write_signals) write_filtered(w, filtered);
      w.json_file("preprocess_summary.json", preprocess_summary(filtered, c));
      const auto mr = analyse_montages(filtered, c);
      write_montage_outputs(w, mr);
      const auto sr = analyse_saccades(filtered, c, mr);
      write_saccade_outputs(w, sr);
      write_regression_outputs(w, sr, regress(sr, c));
      break;
    }
  }
  return w.finish(command, c);
}

}  // namespace eargaze::pipeline
