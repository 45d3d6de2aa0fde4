#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "radar_ibi/config.hpp"
#include "radar_ibi/displacement.hpp"
#include "radar_ibi/filter.hpp"
#include "radar_ibi/imaging.hpp"
#include "radar_ibi/radar_cube.hpp"
#include "radar_ibi/spectral.hpp"
#include "radar_ibi/topology.hpp"

namespace radar_ibi {

struct TopologyRun {
  DisplacementTrace filtered;
  FeatureSequence features;
  IbiSeries ibi;
};

/// Filter, optionally smooth, extract features and gate IBI pairs.
inline TopologyRun run_topology(const DisplacementTrace& detrended, const FilterSpec& filter,
                                const PipelineConfig& cfg) {
  TopologyRun run;
  run.filtered = apply_filter(detrended, filter);
  DisplacementTrace shaped =
      cfg.feature_smoothing_s > 0.0 ? gaussian_smooth(run.filtered, cfg.feature_smoothing_s) : run.filtered;
  run.features = extract_features(shaped);
  run.ibi = estimate_ibi(shaped, run.features, cfg.topology, cfg.ibi_bounds());
  return run;
}

inline TopologyRun run_topology(const DisplacementTrace& detrended, double f_c, const PipelineConfig& cfg) {
  return run_topology(detrended, FilterSpec::high_pass(f_c, cfg.filter_order), cfg);
}

struct PipelineResult {
  TargetLocation location;
  DisplacementTrace raw;
  DisplacementTrace detrended;
  Psd psd;
  CutoffSelection cutoff;
  TopologyRun topology;
  std::vector<std::string> warnings;
};

/// Detrended trace onwards: PSD, cutoff selection, topology.
inline PipelineResult process_trace(const DisplacementTrace& raw, const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult res;
  res.raw = raw;
  res.detrended = gaussian_detrend(raw, cfg.detrend);
  res.psd = estimate_psd(res.detrended, cfg.psd_smoothing_bw_hz);
  res.cutoff = select_cutoff(res.psd, cfg.band);
  if (cfg.cutoff_override_hz) {
    res.cutoff.f_c = *cfg.cutoff_override_hz;
    res.cutoff.warnings.push_back("cutoff forced to " + std::to_string(res.cutoff.f_c) + " Hz by configuration");
  }
  res.warnings.insert(res.warnings.end(), res.cutoff.warnings.begin(), res.cutoff.warnings.end());
  res.topology = run_topology(res.detrended, res.cutoff.f_c, cfg);
  return res;
}

/// Full chain from a radar cube.
inline PipelineResult process_cube(const RadarCube& cube, const PipelineConfig& cfg) {
  cfg.validate();
  cube.validate();
  std::vector<std::string> warnings;
  auto clamp_horizon = [&](double h, const char* what) {
    if (h <= cube.duration()) return h;
    warnings.push_back(std::string(what) + " horizon " + std::to_string(h) + " s shortened to the " +
                       std::to_string(cube.duration()) + " s record");
    return cube.duration();
  };
  const double clutter_h = clamp_horizon(cfg.clutter_horizon_s, "clutter");
  const double loc_h = clamp_horizon(cfg.localization_horizon_s, "localization");

  const auto weights = cfg.weights(cube.n_channels());
  const auto map = clutter_free_power_map(cube, weights, clutter_h, loc_h);
  const auto loc = locate_target(map, cfg.search);
  const auto cell = beamform_cell(cube, weights, loc.range_index, loc.angle_index, clutter_h);
  auto res = process_trace(phase_displacement(cell, cube.slow_time_fs(), cube.wavelength()), cfg);
  res.location = loc;
  warnings.insert(warnings.end(), loc.warnings.begin(), loc.warnings.end());
  res.warnings.insert(res.warnings.begin(), warnings.begin(), warnings.end());
  return res;
}

}  // namespace radar_ibi
