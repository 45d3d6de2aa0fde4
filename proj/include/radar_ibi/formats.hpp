#pragma once

// CSV and JSON encodings of traces, IBI series, sweeps, reports, scenes and
// configurations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radar_ibi/config.hpp"
#include "radar_ibi/cube_io.hpp"
#include "radar_ibi/errors.hpp"
#include "radar_ibi/evaluation.hpp"
#include "radar_ibi/scene_sim.hpp"
#include "radar_ibi/spectral.hpp"
#include "radar_ibi/topology.hpp"
#include "radar_ibi/trace.hpp"

namespace radar_ibi {

using json = nlohmann::json;

namespace detail {

inline std::string format_number(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace detail

// ---- CSV -----------------------------------------------------------------

inline std::string trace_csv(const DisplacementTrace& trace) {
  std::string out = "time_s,displacement_m\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out += detail::format_number("%.9g", trace.time(i)) + "," + detail::format_number("%.9g", trace.samples[i]) + "\n";
  return out;
}

inline std::string ibi_csv(const IbiSeries& series) {
  std::string out = "time_s,ibi_s,topo_similarity,local_corr\n";
  for (const auto& e : series.entries)
    out += detail::format_number("%.6f", e.time) + "," + detail::format_number("%.6f", e.interval) + "," +
           detail::format_number("%.6f", e.score.topo_similarity) + "," +
           detail::format_number("%.6f", e.score.local_corr) + "\n";
  return out;
}

inline std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "f_c_hz,rms_error_s,coverage\n";
  for (const auto& p : sweep.curve)
    out += detail::format_number("%.6f", p.f_c) + "," +
           (p.rms_error_s ? detail::format_number("%.9f", *p.rms_error_s) : std::string("nan")) + "," +
           detail::format_number("%.6f", p.coverage) + "\n";
  return out;
}

inline std::string sidecar_csv(const std::vector<double>& onsets) {
  std::string out = "onset_s\n";
  for (double t : onsets) out += detail::format_number("%.6f", t) + "\n";
  return out;
}

/// A parsed CSV file with a header row; every cell numeric ("nan" allowed).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw DataIntegrity("CSV has no column '" + name + "'");
  }
  std::vector<double> values(std::size_t col) const {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.at(col));
    return out;
  }
};

inline CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataIntegrity("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.columns.empty()) {
      table.columns = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.columns.size())
      throw DataIntegrity(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(table.columns.size()) + " cells, found " + std::to_string(cells.size()));
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (c.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw DataIntegrity(path.string() + ":" + std::to_string(line_no) + ": '" + c + "' is not a number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw DataIntegrity(path.string() + ": empty CSV file");
  return table;
}

/// Reads an IBI CSV back; gating scores are restored, pair indices are not.
inline IbiSeries read_ibi_csv(const std::filesystem::path& path, double record_length_s = 0.0) {
  const auto table = read_csv_table(path);
  const auto ct = table.column("time_s");
  const auto ci = table.column("ibi_s");
  IbiSeries s;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    IbiEntry e;
    e.time = r[ct];
    e.interval = r[ci];
    if (!(e.interval > 0.0))
      throw DataIntegrity(path.string() + ":" + std::to_string(i + 2) + ": interval must be positive");
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (table.columns[c] == "topo_similarity") e.score.topo_similarity = r[c];
      if (table.columns[c] == "local_corr") e.score.local_corr = r[c];
    }
    spans.emplace_back(e.time - e.interval / 2.0, e.time + e.interval / 2.0);
    s.entries.push_back(e);
  }
  if (record_length_s > 0.0) s.coverage = covered_fraction(std::move(spans), record_length_s);
  return s;
}

// ---- JSON ----------------------------------------------------------------

inline json to_json(const CutoffSelection& c) {
  return {{"f_h1", c.f_h1},           {"f_h2", c.f_h2},         {"candidates", c.candidates},
          {"f_c", c.f_c},             {"fallback", c.fallback}, {"warnings", c.warnings}};
}

inline json to_json(const EvalReport& r) {
  return {{"rms_error_s", r.rms_error_s},
          {"n_compared", r.n_compared},
          {"coverage", r.coverage},
          {"per_entry_errors_s", r.per_entry_errors}};
}

inline json to_json(const TargetLocation& l) {
  return {{"range_index", l.range_index}, {"angle_index", l.angle_index}, {"range_m", l.range_m},
          {"angle_rad", l.angle_rad},     {"power", l.power}};
}

namespace detail {

template <class T>
void read_if(const json& j, const char* key, T& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

}  // namespace detail

inline json to_json(const PipelineConfig& c) {
  json search = json::object();
  if (c.search.range_min_m) search["range_min_m"] = *c.search.range_min_m;
  if (c.search.range_max_m) search["range_max_m"] = *c.search.range_max_m;
  if (c.search.angle_min_rad) search["angle_min_rad"] = *c.search.angle_min_rad;
  if (c.search.angle_max_rad) search["angle_max_rad"] = *c.search.angle_max_rad;
  return {{"species_band", {{"name", c.band.name}, {"f_lo_hz", c.band.f_lo}, {"f_hi_hz", c.band.f_hi}}},
          {"beamformer",
           {{"sidelobe_db", c.beamformer.sidelobe_db},
            {"nbar", c.beamformer.nbar},
            {"angle_min_deg", c.beamformer.angle_min_deg},
            {"angle_max_deg", c.beamformer.angle_max_deg},
            {"angle_step_deg", c.beamformer.angle_step_deg}}},
          {"clutter_horizon_s", c.clutter_horizon_s},
          {"localization_horizon_s", c.localization_horizon_s},
          {"search_window", search},
          {"detrend_sigma_s", c.detrend.sigma_s},
          {"detrend_truncation", c.detrend.truncation},
          {"psd_smoothing_bw_hz", c.psd_smoothing_bw_hz},
          {"filter_order", c.filter_order},
          {"cutoff_override_hz", c.cutoff_override_hz ? json(*c.cutoff_override_hz) : json(nullptr)},
          {"feature_smoothing_s", c.feature_smoothing_s},
          {"topology_window", c.topology.window},
          {"local_corr_seg_len_s", c.topology.seg_len_s},
          {"c0", c.topology.thresholds.c0},
          {"m0", c.topology.thresholds.m0},
          {"ibi_margin", c.ibi_margin}};
}

/// Keys absent from `j` keep the value of `base`; `preset` ("human" or
/// "chimpanzee") picks the base when given in the document.
inline PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig base = PipelineConfig::human()) {
  detail::require(j.is_object(), "pipeline configuration must be a JSON object");
  detail::reject_unknown(j,
                         {"preset", "species_band", "beamformer", "clutter_horizon_s", "localization_horizon_s",
                          "search_window", "detrend_sigma_s", "detrend_truncation", "psd_smoothing_bw_hz",
                          "filter_order", "cutoff_override_hz", "feature_smoothing_s", "topology_window",
                          "local_corr_seg_len_s", "c0", "m0", "ibi_margin"},
                         "pipeline configuration");
  PipelineConfig c = base;
  try {
    if (j.contains("preset")) {
      const auto p = j.at("preset").get<std::string>();
      if (p == "human")
        c = PipelineConfig::human();
      else if (p == "chimpanzee")
        c = PipelineConfig::chimpanzee();
      else
        throw InvalidArgument("unknown preset '" + p + "'");
    }
    if (j.contains("species_band")) {
      const auto& b = j.at("species_band");
      detail::read_if(b, "name", c.band.name);
      detail::read_if(b, "f_lo_hz", c.band.f_lo);
      detail::read_if(b, "f_hi_hz", c.band.f_hi);
    }
    if (j.contains("beamformer")) {
      const auto& b = j.at("beamformer");
      detail::read_if(b, "sidelobe_db", c.beamformer.sidelobe_db);
      detail::read_if(b, "nbar", c.beamformer.nbar);
      detail::read_if(b, "angle_min_deg", c.beamformer.angle_min_deg);
      detail::read_if(b, "angle_max_deg", c.beamformer.angle_max_deg);
      detail::read_if(b, "angle_step_deg", c.beamformer.angle_step_deg);
    }
    detail::read_if(j, "clutter_horizon_s", c.clutter_horizon_s);
    detail::read_if(j, "localization_horizon_s", c.localization_horizon_s);
    if (j.contains("search_window")) {
      const auto& w = j.at("search_window");
      auto opt = [&](const char* k, std::optional<double>& dst) {
        if (w.contains(k)) dst = w.at(k).is_null() ? std::nullopt : std::optional<double>(w.at(k).get<double>());
      };
      opt("range_min_m", c.search.range_min_m);
      opt("range_max_m", c.search.range_max_m);
      opt("angle_min_rad", c.search.angle_min_rad);
      opt("angle_max_rad", c.search.angle_max_rad);
    }
    detail::read_if(j, "detrend_sigma_s", c.detrend.sigma_s);
    detail::read_if(j, "detrend_truncation", c.detrend.truncation);
    detail::read_if(j, "psd_smoothing_bw_hz", c.psd_smoothing_bw_hz);
    detail::read_if(j, "filter_order", c.filter_order);
    if (j.contains("cutoff_override_hz"))
      c.cutoff_override_hz =
          j.at("cutoff_override_hz").is_null() ? std::nullopt : std::optional<double>(j.at("cutoff_override_hz").get<double>());
    detail::read_if(j, "feature_smoothing_s", c.feature_smoothing_s);
    detail::read_if(j, "topology_window", c.topology.window);
    detail::read_if(j, "local_corr_seg_len_s", c.topology.seg_len_s);
    detail::read_if(j, "c0", c.topology.thresholds.c0);
    detail::read_if(j, "m0", c.topology.thresholds.m0);
    detail::read_if(j, "ibi_margin", c.ibi_margin);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("pipeline configuration: ") + e.what());
  }
  c.validate();
  return c;
}

inline json to_json(const SceneSpec& s, const ArrayGeometry& g = {}) {
  json clutter = json::array();
  for (const auto& r : s.clutter)
    clutter.push_back({{"range_m", r.range_m},
                       {"angle_rad", r.angle_rad},
                       {"amplitude_re", r.amplitude.real()},
                       {"amplitude_im", r.amplitude.imag()}});
  return {{"target_range_m", s.target_range_m},
          {"target_angle_rad", s.target_angle_rad},
          {"target_amplitude", s.target_amplitude},
          {"physio",
           {{"resp_freq_hz", s.physio.resp_freq_hz},
            {"resp_amp_m", s.physio.resp_amp_m},
            {"resp_shape_exponent", s.physio.resp_shape_exponent},
            {"heart_ibi_s", s.physio.heart_ibi_s},
            {"heart_amp_m", s.physio.heart_amp_m},
            {"heart_pulse_width_s", s.physio.heart_pulse_width_s}}},
          {"clutter", clutter},
          {"noise_snr_db", s.noiseless() ? json(nullptr) : json(s.noise_snr_db)},
          {"duration_s", s.duration_s},
          {"slow_time_fs_hz", s.slow_time_fs_hz},
          {"range_bins", s.range_bins},
          {"range_resolution_m", s.range_resolution_m},
          {"range_start_m", s.range_start_m},
          {"leakage_half_width", s.leakage_half_width},
          {"seed", s.seed},
          {"array", {{"n_tx", g.n_tx}, {"n_rx", g.n_rx}, {"wavelength_m", g.wavelength_m}}}};
}

struct SceneDocument {
  SceneSpec scene;
  ArrayGeometry geometry;
};

/// Scene from JSON on top of `base`. A null `noise_snr_db` means noiseless;
/// `heart_ibi_s` accepts a number or a list.
inline SceneDocument scene_from_json(const json& j, SceneSpec base = human_default_scene()) {
  detail::require(j.is_object(), "scene must be a JSON object");
  detail::reject_unknown(j,
                         {"target_range_m", "target_angle_rad", "target_amplitude", "physio", "clutter",
                          "noise_snr_db", "duration_s", "slow_time_fs_hz", "range_bins", "range_resolution_m",
                          "range_start_m", "leakage_half_width", "seed", "array"},
                         "scene");
  SceneDocument d{base, {}};
  auto& s = d.scene;
  try {
    detail::read_if(j, "target_range_m", s.target_range_m);
    detail::read_if(j, "target_angle_rad", s.target_angle_rad);
    detail::read_if(j, "target_amplitude", s.target_amplitude);
    if (j.contains("physio")) {
      const auto& p = j.at("physio");
      detail::read_if(p, "resp_freq_hz", s.physio.resp_freq_hz);
      detail::read_if(p, "resp_amp_m", s.physio.resp_amp_m);
      detail::read_if(p, "resp_shape_exponent", s.physio.resp_shape_exponent);
      if (p.contains("heart_ibi_s")) {
        const auto& v = p.at("heart_ibi_s");
        s.physio.heart_ibi_s = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      }
      detail::read_if(p, "heart_amp_m", s.physio.heart_amp_m);
      detail::read_if(p, "heart_pulse_width_s", s.physio.heart_pulse_width_s);
    }
    if (j.contains("clutter")) {
      s.clutter.clear();
      for (const auto& r : j.at("clutter"))
        s.clutter.push_back({r.at("range_m").get<double>(), r.value("angle_rad", 0.0),
                             cdouble(r.value("amplitude_re", 0.0), r.value("amplitude_im", 0.0))});
    }
    if (j.contains("noise_snr_db"))
      s.noise_snr_db = j.at("noise_snr_db").is_null() ? std::numeric_limits<double>::infinity()
                                                      : j.at("noise_snr_db").get<double>();
    detail::read_if(j, "duration_s", s.duration_s);
    detail::read_if(j, "slow_time_fs_hz", s.slow_time_fs_hz);
    detail::read_if(j, "range_bins", s.range_bins);
    detail::read_if(j, "range_resolution_m", s.range_resolution_m);
    detail::read_if(j, "range_start_m", s.range_start_m);
    detail::read_if(j, "leakage_half_width", s.leakage_half_width);
    detail::read_if(j, "seed", s.seed);
    if (j.contains("array")) {
      const auto& a = j.at("array");
      detail::read_if(a, "n_tx", d.geometry.n_tx);
      detail::read_if(a, "n_rx", d.geometry.n_rx);
      detail::read_if(a, "wavelength_m", d.geometry.wavelength_m);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scene: ") + e.what());
  }
  s.validate();
  d.geometry.validate();
  return d;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataIntegrity("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataIntegrity(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace radar_ibi
