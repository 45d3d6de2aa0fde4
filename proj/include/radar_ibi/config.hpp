#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "radar_ibi/displacement.hpp"
#include "radar_ibi/errors.hpp"
#include "radar_ibi/imaging.hpp"
#include "radar_ibi/spectral.hpp"
#include "radar_ibi/topology.hpp"

namespace radar_ibi {

struct BeamformerConfig {
  double sidelobe_db = 25.0;
  int nbar = 4;
  double angle_min_deg = -60.0;
  double angle_max_deg = 60.0;
  double angle_step_deg = 1.0;
};

/// Every tunable of the processing chain, cube to IBI series.
struct PipelineConfig {
  SpeciesBand band = SpeciesBand::human();
  BeamformerConfig beamformer;
  double clutter_horizon_s = 120.0;
  double localization_horizon_s = 120.0;
  SearchWindow search;
  DetrendConfig detrend;
  double psd_smoothing_bw_hz = 0.1;
  int filter_order = 4;
  std::optional<double> cutoff_override_hz;
  /// Gaussian sigma applied to the filtered trace before feature extraction; 0 disables.
  double feature_smoothing_s = 0.01;
  TopologyConfig topology;
  double ibi_margin = 0.2;

  static PipelineConfig human() { return {}; }

  static PipelineConfig chimpanzee() {
    PipelineConfig c;
    c.band = SpeciesBand::chimpanzee();
    c.clutter_horizon_s = 60.0;
    c.localization_horizon_s = 60.0;
    return c;
  }

  IbiBounds ibi_bounds() const { return IbiBounds::from_band(band, ibi_margin); }

  BeamformerWeights weights(std::size_t n_channels) const {
    return {taylor_weights(n_channels, beamformer.sidelobe_db, beamformer.nbar),
            angle_grid_deg(beamformer.angle_min_deg, beamformer.angle_max_deg, beamformer.angle_step_deg)};
  }

  void validate() const {
    band.validate();
    detrend.validate();
    detail::require(clutter_horizon_s > 0.0 && localization_horizon_s > 0.0, "horizons must be positive");
    detail::require(psd_smoothing_bw_hz > 0.0, "psd smoothing bandwidth must be positive");
    detail::require(filter_order >= 1 && filter_order <= 16, "filter order must be in [1, 16]");
    detail::require(feature_smoothing_s >= 0.0, "feature smoothing must be non-negative");
    detail::require(topology.window >= 1, "similarity window must hold at least one feature point");
    detail::require(topology.seg_len_s > 0.0, "correlation segment length must be positive");
    detail::require(topology.thresholds.c0 >= -1.0 && topology.thresholds.c0 <= 1.0 + 1e-6,
                    "c0 must lie in [-1, 1]");
    detail::require(topology.thresholds.m0 >= 0.0 && topology.thresholds.m0 <= 1.0 + 1e-6, "m0 must lie in [0, 1]");
    detail::require(ibi_margin >= 0.0 && ibi_margin < 1.0, "ibi margin must lie in [0, 1)");
    detail::require(beamformer.angle_min_deg > -90.0 && beamformer.angle_max_deg < 90.0,
                    "beamformer angles must lie in (-90, 90) degrees");
    if (cutoff_override_hz) detail::require(*cutoff_override_hz > 0.0, "cutoff override must be positive");
  }
};

}  // namespace radar_ibi
