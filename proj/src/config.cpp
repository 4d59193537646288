#include "eargaze/config.hpp"

#include <cstdio>
#include <set>

#include "eargaze/error.hpp"
#include "eargaze/io.hpp"
#include "eargaze/report.hpp"

namespace eargaze::config {

using nlohmann::json;

namespace {

std::string_view mode_name(dsp::FilterMode m) { return m == dsp::FilterMode::causal ? "causal" : "zero_phase"; }
std::string_view initial_name(dsp::InitialState s) { return s == dsp::InitialState::steady ? "steady" : "zero"; }
std::string_view interp_name(dsp::Interpolation i) { return i == dsp::Interpolation::linear ? "linear" : "cubic"; }
std::string_view sign_name(saccade::DeflectionSign s) {
  return s == saccade::DeflectionSign::first_minus_last ? "first_minus_last" : "last_minus_first";
}
std::string_view scope_name(saccade::ModelScope s) {
  return s == saccade::ModelScope::per_axis ? "per_axis" : "per_direction";
}
std::string_view exec_name(kernels::Execution e) { return e == kernels::Execution::serial ? "serial" : "parallel"; }

template <typename E>
E pick(const json& v, const std::string& key, std::initializer_list<std::pair<std::string_view, E>> options) {
  const auto text = v.get<std::string>();
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  throw ValidationError("config: '" + key + "' has unknown value '" + text + "'");
}

// Keys present in `given` but not in `known`; objects are compared recursively.
void check_known(const json& given, const json& known, const std::string& prefix) {
  if (!given.is_object()) throw ValidationError("config: '" + prefix + "' must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const auto key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key())) throw ValidationError("config: unknown key '" + key + "'");
    if (it.value().is_null()) throw ValidationError("config: '" + key + "' is null");
    if (known.at(it.key()).is_object()) check_known(it.value(), known.at(it.key()), key);
  }
}

}  // namespace

json to_json(const PipelineConfig& c) {
  json directions = json::array();
  for (auto d : c.protocol.saccade.directions) directions.push_back(to_string(d));
  const auto& n = c.synthetic.noise;
  const auto& r = c.montage.rank;
  const auto& seg = c.saccade.segmentation;
  const auto& def = c.saccade.deflection;
  return {
      {"seed", c.seed},
      {"execution", exec_name(c.execution)},
      {"paths",
       {{"data_dir", c.paths.data_dir},
        {"layout", c.paths.layout},
        {"screen", c.paths.screen},
        {"output_dir", c.paths.output_dir},
        {"overrides_csv", c.paths.overrides_csv}}},
      {"synthetic",
       {{"subjects", c.synthetic.subjects},
        {"adc_resolution_uv", c.synthetic.adc_resolution_uv},
        {"noise",
         {{"drift_amplitude_uv", n.drift_amplitude_uv},
          {"drift_period_s", n.drift_period_s},
          {"white_noise_sd_uv", n.white_noise_sd_uv},
          {"mains_amplitude_uv", n.mains_amplitude_uv},
          {"mains_frequency_hz", n.mains_frequency_hz}}},
        {"gaze",
         {{"rate_hz", c.synthetic.gaze.rate_hz},
          {"missing_fraction", c.synthetic.gaze.missing_fraction},
          {"delay_s", c.synthetic.gaze.delay_s},
          {"jitter_s", c.synthetic.gaze.jitter_s}}}}},
      {"protocol",
       {{"sample_rate_hz", c.protocol.sample_rate_hz},
        {"pursuit",
         {{"amplitudes_deg", c.protocol.pursuit.amplitudes_deg},
          {"frequencies_hz", c.protocol.pursuit.frequencies_hz},
          {"trial_duration_s", c.protocol.pursuit.trial_duration_s},
          {"lead_in_s", c.protocol.pursuit.lead_in_s},
          {"gap_s", c.protocol.pursuit.gap_s}}},
        {"saccade",
         {{"angles_deg", c.protocol.saccade.angles_deg},
          {"directions", directions},
          {"fixation_s", c.protocol.saccade.fixation_s},
          {"rest_s", c.protocol.saccade.rest_s},
          {"cycles", c.protocol.saccade.cycles}}}}},
      {"preprocess",
       {{"low_cut_hz", c.preprocess.filter.low_cut_hz},
        {"high_cut_hz", c.preprocess.filter.high_cut_hz},
        {"order", c.preprocess.filter.order},
        {"mode", mode_name(c.preprocess.options.mode)},
        {"initial_state", initial_name(c.preprocess.options.initial)},
        {"write_signals", c.preprocess.write_signals}}},
      {"montage",
       {{"tolerance_deg", c.montage.tolerance_deg},
        {"max_lag_eog", r.max_lag_eog},
        {"max_lag_cam", r.max_lag_cam},
        {"mean_window", r.mean_window},
        {"with_detrend", r.with_detrend},
        {"aggregation", report::to_string(r.aggregation)},
        {"alpha", c.montage.alpha},
        {"wilcoxon_exact_max_n", c.montage.wilcoxon_exact_max_n},
        {"gaze_interpolation", interp_name(c.montage.gaze_interpolation)}}},
      {"saccade",
       {{"velocity_threshold_uv", seg.velocity_threshold_uv},
        {"min_duration_s", seg.min_duration_s},
        {"max_duration_s", seg.max_duration_s},
        {"search_before_s", seg.search_before_s},
        {"search_after_s", seg.search_after_s},
        {"resample_len", def.resample_len},
        {"context_s", def.context_s},
        {"deflection_sign", sign_name(def.sign)},
        {"include_returns", def.include_returns},
        {"montage_horizontal", c.saccade.montage_horizontal},
        {"montage_vertical", c.saccade.montage_vertical},
        {"model_scope", scope_name(c.saccade.model_scope)}}},
  };
}

PipelineConfig from_json(const json& value) {
  const PipelineConfig defaults;
  const auto known = to_json(defaults);
  check_known(value, known, "");
  json m = known;
  m.merge_patch(value);
  PipelineConfig c;
  try {
    c.seed = m.at("seed").get<std::uint64_t>();
    c.execution = pick<kernels::Execution>(m.at("execution"), "execution",
                                           {{"serial", kernels::Execution::serial},
                                            {"parallel", kernels::Execution::parallel}});
    const auto& p = m.at("paths");
    c.paths.data_dir = p.at("data_dir").get<std::string>();
    c.paths.layout = p.at("layout").get<std::string>();
    c.paths.screen = p.at("screen").get<std::string>();
    c.paths.output_dir = p.at("output_dir").get<std::string>();
    c.paths.overrides_csv = p.at("overrides_csv").get<std::string>();

    const auto& s = m.at("synthetic");
    c.synthetic.subjects = s.at("subjects").get<int>();
    c.synthetic.adc_resolution_uv = s.at("adc_resolution_uv").get<double>();
    const auto& n = s.at("noise");
    c.synthetic.noise.drift_amplitude_uv = n.at("drift_amplitude_uv").get<double>();
    c.synthetic.noise.drift_period_s = n.at("drift_period_s").get<double>();
    c.synthetic.noise.white_noise_sd_uv = n.at("white_noise_sd_uv").get<double>();
    c.synthetic.noise.mains_amplitude_uv = n.at("mains_amplitude_uv").get<double>();
    c.synthetic.noise.mains_frequency_hz = n.at("mains_frequency_hz").get<double>();
    const auto& g = s.at("gaze");
    c.synthetic.gaze.rate_hz = g.at("rate_hz").get<double>();
    c.synthetic.gaze.missing_fraction = g.at("missing_fraction").get<double>();
    c.synthetic.gaze.delay_s = g.at("delay_s").get<double>();
    c.synthetic.gaze.jitter_s = g.at("jitter_s").get<double>();

    const auto& pr = m.at("protocol");
    c.protocol.sample_rate_hz = pr.at("sample_rate_hz").get<double>();
    const auto& pu = pr.at("pursuit");
    c.protocol.pursuit.amplitudes_deg = pu.at("amplitudes_deg").get<std::vector<double>>();
    c.protocol.pursuit.frequencies_hz = pu.at("frequencies_hz").get<std::vector<double>>();
    c.protocol.pursuit.trial_duration_s = pu.at("trial_duration_s").get<double>();
    c.protocol.pursuit.lead_in_s = pu.at("lead_in_s").get<double>();
    c.protocol.pursuit.gap_s = pu.at("gap_s").get<double>();
    c.protocol.pursuit.sample_rate_hz = c.protocol.sample_rate_hz;
    const auto& sa = pr.at("saccade");
    c.protocol.saccade.angles_deg = sa.at("angles_deg").get<std::vector<double>>();
    c.protocol.saccade.directions.clear();
    for (const auto& d : sa.at("directions")) c.protocol.saccade.directions.push_back(parse_direction(d.get<std::string>()));
    c.protocol.saccade.fixation_s = sa.at("fixation_s").get<double>();
    c.protocol.saccade.rest_s = sa.at("rest_s").get<double>();
    c.protocol.saccade.cycles = sa.at("cycles").get<int>();
    c.protocol.saccade.sample_rate_hz = c.protocol.sample_rate_hz;

    const auto& pp = m.at("preprocess");
    c.preprocess.filter.low_cut_hz = pp.at("low_cut_hz").get<double>();
    c.preprocess.filter.high_cut_hz = pp.at("high_cut_hz").get<double>();
    c.preprocess.filter.order = pp.at("order").get<int>();
    c.preprocess.filter.sample_rate_hz = c.protocol.sample_rate_hz;
    c.preprocess.options.mode = pick<dsp::FilterMode>(
        pp.at("mode"), "preprocess.mode", {{"causal", dsp::FilterMode::causal}, {"zero_phase", dsp::FilterMode::zero_phase}});
    c.preprocess.options.initial = pick<dsp::InitialState>(
        pp.at("initial_state"), "preprocess.initial_state",
        {{"steady", dsp::InitialState::steady}, {"zero", dsp::InitialState::zero}});
    c.preprocess.write_signals = pp.at("write_signals").get<bool>();

    const auto& mo = m.at("montage");
    c.montage.tolerance_deg = mo.at("tolerance_deg").get<double>();
    c.montage.rank.max_lag_eog = mo.at("max_lag_eog").get<int>();
    c.montage.rank.max_lag_cam = mo.at("max_lag_cam").get<int>();
    c.montage.rank.mean_window = mo.at("mean_window").get<int>();
    c.montage.rank.with_detrend = mo.at("with_detrend").get<bool>();
    c.montage.rank.aggregation = report::parse_aggregation(mo.at("aggregation").get<std::string>());
    c.montage.rank.execution = c.execution;
    c.montage.alpha = mo.at("alpha").get<double>();
    c.montage.wilcoxon_exact_max_n = mo.at("wilcoxon_exact_max_n").get<std::size_t>();
    c.montage.gaze_interpolation = pick<dsp::Interpolation>(
        mo.at("gaze_interpolation"), "montage.gaze_interpolation",
        {{"linear", dsp::Interpolation::linear}, {"cubic", dsp::Interpolation::cubic}});

    const auto& sc = m.at("saccade");
    auto& seg = c.saccade.segmentation;
    seg.velocity_threshold_uv = sc.at("velocity_threshold_uv").get<double>();
    seg.min_duration_s = sc.at("min_duration_s").get<double>();
    seg.max_duration_s = sc.at("max_duration_s").get<double>();
    seg.search_before_s = sc.at("search_before_s").get<double>();
    seg.search_after_s = sc.at("search_after_s").get<double>();
    auto& def = c.saccade.deflection;
    def.resample_len = sc.at("resample_len").get<std::size_t>();
    def.context_s = sc.at("context_s").get<double>();
    def.sign = pick<saccade::DeflectionSign>(sc.at("deflection_sign"), "saccade.deflection_sign",
                                             {{"first_minus_last", saccade::DeflectionSign::first_minus_last},
                                              {"last_minus_first", saccade::DeflectionSign::last_minus_first}});
    def.include_returns = sc.at("include_returns").get<bool>();
    c.saccade.montage_horizontal = sc.at("montage_horizontal").get<std::string>();
    c.saccade.montage_vertical = sc.at("montage_vertical").get<std::string>();
    c.saccade.model_scope = pick<saccade::ModelScope>(
        sc.at("model_scope"), "saccade.model_scope",
        {{"per_axis", saccade::ModelScope::per_axis}, {"per_direction", saccade::ModelScope::per_direction}});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

void PipelineConfig::validate() const {
  if (paths.output_dir.empty()) throw ValidationError("config: paths.output_dir must be set");
  if (synthetic.subjects < 2 || synthetic.subjects > 999) {
    throw ValidationError("config: synthetic.subjects must be in [2, 999]");
  }
  if (!(synthetic.adc_resolution_uv >= 0.0)) throw ValidationError("config: adc_resolution_uv must be >= 0");
  auto noise = synthetic.noise;
  noise.validate();
  const auto& g = synthetic.gaze;
  if (!(g.rate_hz > 0.0)) throw ValidationError("config: synthetic.gaze.rate_hz must be positive");
  if (!(g.missing_fraction >= 0.0 && g.missing_fraction < 1.0)) {
    throw ValidationError("config: synthetic.gaze.missing_fraction must be in [0, 1)");
  }
  if (!(g.delay_s >= 0.0)) throw ValidationError("config: synthetic.gaze.delay_s must be >= 0");
  if (!(g.jitter_s >= 0.0 && g.jitter_s < 1.0 / g.rate_hz)) {
    throw ValidationError("config: synthetic.gaze.jitter_s must be in [0, 1 / rate_hz)");
  }
  if (!(protocol.sample_rate_hz > 0.0)) throw ValidationError("config: protocol.sample_rate_hz must be positive");
  const auto& pu = protocol.pursuit;
  if (pu.amplitudes_deg.empty() || pu.frequencies_hz.empty()) {
    throw ValidationError("config: pursuit amplitudes and frequencies must be non-empty");
  }
  for (double a : pu.amplitudes_deg) {
    if (!(a > 0.0 && a <= 45.0)) throw ValidationError("config: pursuit amplitudes must be in (0, 45]");
  }
  for (double f : pu.frequencies_hz) {
    if (!(f > 0.0 && f < protocol.sample_rate_hz / 2.0)) throw ValidationError("config: pursuit frequency out of range");
  }
  if (!(pu.trial_duration_s > 0.0 && pu.lead_in_s >= 0.0 && pu.gap_s >= 0.0)) {
    throw ValidationError("config: pursuit durations must be non-negative, trials positive");
  }
  const auto& sa = protocol.saccade;
  if (sa.angles_deg.empty() || sa.directions.empty()) throw ValidationError("config: saccade angles/directions empty");
  for (double a : sa.angles_deg) {
    if (!(a > 0.0 && a <= 45.0)) throw ValidationError("config: saccade angles must be in (0, 45]");
  }
  if (std::set<Direction>(sa.directions.begin(), sa.directions.end()).size() != sa.directions.size()) {
    throw ValidationError("config: saccade directions repeat");
  }
  if (!(sa.fixation_s > 0.0 && sa.rest_s > 0.0 && sa.cycles >= 1)) {
    throw ValidationError("config: saccade fixation/rest must be positive, cycles >= 1");
  }
  preprocess.filter.validate();

  const auto& r = montage.rank;
  if (!(montage.tolerance_deg >= 0.0 && montage.tolerance_deg < 45.0)) {
    throw ValidationError("config: montage.tolerance_deg must be in [0, 45)");
  }
  if (r.max_lag_eog < 0 || r.max_lag_cam < 0) throw ValidationError("config: lags must be >= 0");
  if (r.mean_window < 1) throw ValidationError("config: montage.mean_window must be >= 1");
  const auto trial_samples = static_cast<int>(pu.trial_duration_s * protocol.sample_rate_hz);
  if (std::max(r.max_lag_eog, r.max_lag_cam) + 3 > trial_samples) {
    throw ValidationError("config: max lag leaves fewer than 3 overlapping samples per trial");
  }
  if (trial_samples < 50) throw ValidationError("config: pursuit trials must span at least 50 samples");
  if (!(montage.alpha > 0.0 && montage.alpha < 1.0)) throw ValidationError("config: montage.alpha must be in (0, 1)");
  if (montage.wilcoxon_exact_max_n > 60) throw ValidationError("config: wilcoxon_exact_max_n must be <= 60");

  saccade.segmentation.validate();
  if (saccade.segmentation.search_before_s + saccade.segmentation.search_after_s >= sa.fixation_s + sa.rest_s) {
    throw ValidationError("config: saccade search window overlaps neighbouring saccades");
  }
  if (saccade.deflection.resample_len < 20) throw ValidationError("config: saccade.resample_len must be >= 20");
  if (!(saccade.deflection.context_s >= 0.0 && saccade.deflection.context_s < sa.fixation_s)) {
    throw ValidationError("config: saccade.context_s must be in [0, fixation_s)");
  }
  for (const auto* name : {&saccade.montage_horizontal, &saccade.montage_vertical}) {
    if (*name != "top") montage::parse_montage(*name, Axis::horizontal);
  }
}

void PipelineConfig::check_paths() const {
  auto require = [](const std::string& p, const char* key) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw ValidationError(std::string("config: ") + key + " '" + p + "' does not exist");
    }
  };
  require(paths.data_dir, "paths.data_dir");
  require(paths.layout, "paths.layout");
  require(paths.screen, "paths.screen");
  require(paths.overrides_csv, "paths.overrides_csv");
}

PipelineConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  json value = json::object();
  if (!path.empty()) {
    try {
      value = io::read_json(path);
    } catch (const DataError& e) {
      throw ValidationError(std::string("config: ") + e.what());
    }
  }
  const auto known = to_json(PipelineConfig{});
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + item + "' is not key=value");
    const auto key = item.substr(0, eq);
    const auto text = item.substr(eq + 1);
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) parsed = text;
    json::json_pointer ptr;
    std::size_t start = 0;
    const json* probe = &known;
    while (true) {
      const auto dot = key.find('.', start);
      const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty() || !probe->is_object() || !probe->contains(part)) {
        throw ValidationError("override: unknown key '" + key + "'");
      }
      probe = &probe->at(part);
      ptr /= part;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    if (probe->is_string() && !parsed.is_string()) parsed = text;
    value[ptr] = parsed;
  }
  auto c = from_json(value);
  c.validate();
  return c;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string config_hash(const PipelineConfig& config) { return hex64(fnv1a64(to_json(config).dump())); }

}  // namespace eargaze::config
