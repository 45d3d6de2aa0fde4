#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "radar_ibi/errors.hpp"

namespace radar_ibi {

/// Uniformly sampled chest displacement in meters.
struct DisplacementTrace {
  std::vector<double> samples;
  double fs = 1.0;
  double t0 = 0.0;
  bool detrended = false;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) / fs; }
  double duration() const noexcept { return static_cast<double>(samples.size()) / fs; }

  void validate() const {
    detail::require(fs > 0.0 && std::isfinite(fs), "trace sampling frequency must be positive");
    for (double v : samples) detail::require(std::isfinite(v), "trace contains non-finite samples");
  }
};

}  // namespace radar_ibi
