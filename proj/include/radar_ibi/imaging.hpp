#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/radar_cube.hpp"

namespace radar_ibi {

/// Taylor amplitude taper for a uniform linear array.
///
/// `sidelobe_db` is the design sidelobe level (25 or -25 both mean 25 dB
/// below the main lobe); `nbar` is the number of nearly constant-level
/// sidelobes. The taper is scaled so that its largest weight is 1.
inline std::vector<double> taylor_weights(std::size_t n_elements, double sidelobe_db = 25.0, int nbar = 4) {
  detail::require(n_elements >= 1, "taylor taper needs at least one element");
  const double level = std::abs(sidelobe_db);
  detail::require(level > 0.0 && std::isfinite(level), "sidelobe level must be a finite non-zero dB value");
  detail::require(nbar >= 1, "nbar must be at least 1");

  const double b = std::pow(10.0, level / 20.0);
  const double a = std::acosh(b) / std::numbers::pi;
  // Below this nbar the taper turns non-monotone and edge weights blow up.
  detail::require(static_cast<double>(nbar) >= 2.0 * a * a + 0.5,
                  "nbar " + std::to_string(nbar) + " is too small for a " + std::to_string(level) +
                      " dB sidelobe level");
  if (n_elements == 1) return {1.0};

  const double s2 = static_cast<double>(nbar * nbar) / (a * a + (nbar - 0.5) * (nbar - 0.5));
  std::vector<double> fm(static_cast<std::size_t>(nbar - 1));
  for (int m = 1; m < nbar; ++m) {
    double numer = (m % 2 == 1) ? 1.0 : -1.0;
    double denom = 2.0;
    for (int i = 1; i < nbar; ++i) {
      numer *= 1.0 - static_cast<double>(m * m) / s2 / (a * a + (i - 0.5) * (i - 0.5));
      if (i != m) denom *= 1.0 - static_cast<double>(m * m) / static_cast<double>(i * i);
    }
    fm[static_cast<std::size_t>(m - 1)] = numer / denom;
  }

  const auto n = static_cast<double>(n_elements);
  std::vector<double> w(n_elements);
  for (std::size_t k = 0; k < n_elements; ++k) {
    double v = 1.0;
    for (int m = 1; m < nbar; ++m)
      v += 2.0 * fm[static_cast<std::size_t>(m - 1)] *
           std::cos(2.0 * std::numbers::pi * m * (static_cast<double>(k) - n / 2.0 + 0.5) / n);
    w[k] = v;
  }
  const double peak = *std::max_element(w.begin(), w.end());
  for (double& v : w) v /= peak;
  return w;
}

inline std::vector<double> angle_grid_deg(double lo_deg, double hi_deg, double step_deg) {
  detail::require(step_deg > 0.0 && hi_deg >= lo_deg, "angle grid needs lo <= hi and a positive step");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i)
    grid.push_back((lo_deg + static_cast<double>(i) * step_deg) * std::numbers::pi / 180.0);
  return grid;
}

struct BeamformerWeights {
  std::vector<double> taylor;
  std::vector<double> angles_rad;

  /// Taylor (25 dB, nbar 4) over a 1 degree grid spanning +-60 degrees.
  static BeamformerWeights standard(std::size_t n_channels) {
    return {taylor_weights(n_channels, 25.0, 4), angle_grid_deg(-60.0, 60.0, 1.0)};
  }

  /// conj(w_n(theta)) = alpha_n exp(-j pi n sin theta), angle-major.
  std::vector<cdouble> conjugate_steering() const {
    const std::size_t n_ch = taylor.size();
    std::vector<cdouble> out(angles_rad.size() * n_ch);
    for (std::size_t a = 0; a < angles_rad.size(); ++a) {
      const double phase = std::numbers::pi * std::sin(angles_rad[a]);
      for (std::size_t n = 0; n < n_ch; ++n)
        out[a * n_ch + n] = std::polar(taylor[n], -phase * static_cast<double>(n));
    }
    return out;
  }

  void validate() const {
    detail::require(!taylor.empty(), "beamformer needs at least one weight");
    detail::require(!angles_rad.empty(), "angle grid must not be empty");
    for (std::size_t i = 0; i < taylor.size(); ++i) {
      detail::require(taylor[i] > 0.0, "taylor weights must be positive");
      const double mirror = taylor[taylor.size() - 1 - i];
      detail::require(std::abs(taylor[i] - mirror) <= 1e-9 * std::max(taylor[i], mirror),
                      "taylor weights must be symmetric about the array centre");
    }
    for (double th : angles_rad)
      detail::require(std::abs(th) < std::numbers::pi / 2, "angle grid must lie in (-pi/2, pi/2)");
  }
};

/// I'(t, r, theta) or, once clutter is removed, I(t, r, theta).
class RadarImage {
 public:
  RadarImage() = default;
  RadarImage(std::size_t n_time, std::vector<double> range_axis, std::vector<double> angles_rad, double fs,
             double wavelength)
      : n_time_(n_time),
        range_axis_(std::move(range_axis)),
        angles_(std::move(angles_rad)),
        fs_(fs),
        wavelength_(wavelength),
        values_(n_time_ * range_axis_.size() * angles_.size()) {}

  std::size_t n_time() const noexcept { return n_time_; }
  std::size_t n_range() const noexcept { return range_axis_.size(); }
  std::size_t n_angles() const noexcept { return angles_.size(); }
  double fs() const noexcept { return fs_; }
  double wavelength() const noexcept { return wavelength_; }
  double duration() const noexcept { return static_cast<double>(n_time_) / fs_; }
  const std::vector<double>& range_axis() const noexcept { return range_axis_; }
  const std::vector<double>& angles() const noexcept { return angles_; }
  bool clutter_removed() const noexcept { return clutter_removed_; }
  void set_clutter_removed(bool v) noexcept { clutter_removed_ = v; }

  std::size_t index(std::size_t t, std::size_t r, std::size_t a) const noexcept {
    return (t * n_range() + r) * n_angles() + a;
  }
  cdouble& at(std::size_t t, std::size_t r, std::size_t a) noexcept { return values_[index(t, r, a)]; }
  const cdouble& at(std::size_t t, std::size_t r, std::size_t a) const noexcept { return values_[index(t, r, a)]; }
  std::vector<cdouble>& values() noexcept { return values_; }
  const std::vector<cdouble>& values() const noexcept { return values_; }

  /// Slow-time series of one (r, theta) cell.
  std::vector<cdouble> cell(std::size_t r, std::size_t a) const {
    std::vector<cdouble> out(n_time_);
    for (std::size_t t = 0; t < n_time_; ++t) out[t] = at(t, r, a);
    return out;
  }

 private:
  std::size_t n_time_ = 0;
  std::vector<double> range_axis_;
  std::vector<double> angles_;
  double fs_ = 1.0;
  double wavelength_ = 1.0;
  bool clutter_removed_ = false;
  std::vector<cdouble> values_;
};

inline RadarImage beamform(const RadarCube& cube, const BeamformerWeights& weights) {
  weights.validate();
  detail::require(weights.taylor.size() == cube.n_channels(),
                  "beamformer has " + std::to_string(weights.taylor.size()) + " weights but the cube has " +
                      std::to_string(cube.n_channels()) + " channels");
  const std::size_t n_ch = cube.n_channels();
  const std::size_t n_ang = weights.angles_rad.size();
  const auto wconj = weights.conjugate_steering();

  RadarImage image(cube.n_time(), cube.range_axis(), weights.angles_rad, cube.slow_time_fs(), cube.wavelength());
  for (std::size_t t = 0; t < cube.n_time(); ++t) {
    for (std::size_t r = 0; r < cube.n_range(); ++r) {
      const auto s = cube.snapshot(t, r);
      for (std::size_t a = 0; a < n_ang; ++a) {
        cdouble acc{};
        for (std::size_t n = 0; n < n_ch; ++n) acc += wconj[a * n_ch + n] * cdouble(s[n]);
        image.at(t, r, a) = acc;
      }
    }
  }
  return image;
}

namespace detail {

inline std::size_t horizon_samples(double horizon_s, double fs, std::size_t n_time) {
  require(horizon_s > 0.0 && std::isfinite(horizon_s), "horizon must be positive");
  const double available = static_cast<double>(n_time) / fs;
  require(horizon_s <= available * (1.0 + 1e-9),
          "horizon " + std::to_string(horizon_s) + " s exceeds the " + std::to_string(available) + " s record");
  const auto count = static_cast<std::size_t>(std::floor(horizon_s * fs + 1e-9));
  return std::clamp<std::size_t>(count, 1, n_time);
}

}  // namespace detail

/// Subtracts the slow-time mean over [0, horizon] from every cell.
inline RadarImage remove_static_clutter(RadarImage image, double horizon_s) {
  const std::size_t count = detail::horizon_samples(horizon_s, image.fs(), image.n_time());
  const std::size_t cells = image.n_range() * image.n_angles();
  auto& v = image.values();
  // Averaged relative to the first sample so that a constant cell yields its
  // value exactly and the output is exactly zero.
  std::vector<cdouble> mean(cells, cdouble{});
  for (std::size_t t = 0; t < count; ++t)
    for (std::size_t c = 0; c < cells; ++c) mean[c] += v[t * cells + c] - v[c];
  for (std::size_t c = 0; c < cells; ++c) mean[c] = v[c] + mean[c] / static_cast<double>(count);
  for (std::size_t t = 0; t < image.n_time(); ++t)
    for (std::size_t c = 0; c < cells; ++c) v[t * cells + c] -= mean[c];
  image.set_clutter_removed(true);
  return image;
}

/// Inclusive bounds restricting the localization search.
struct SearchWindow {
  std::optional<double> range_min_m;
  std::optional<double> range_max_m;
  std::optional<double> angle_min_rad;
  std::optional<double> angle_max_rad;

  bool contains_range(double r) const noexcept {
    return (!range_min_m || r >= *range_min_m) && (!range_max_m || r <= *range_max_m);
  }
  bool contains_angle(double a) const noexcept {
    return (!angle_min_rad || a >= *angle_min_rad) && (!angle_max_rad || a <= *angle_max_rad);
  }
};

struct TargetLocation {
  std::size_t range_index = 0;
  std::size_t angle_index = 0;
  double range_m = 0.0;
  double angle_rad = 0.0;
  double power = 0.0;
  std::vector<std::string> warnings;
};

/// Time-integrated power sum_t |I(t, r, theta)|^2 over an integration horizon.
struct PowerMap {
  std::vector<double> range_axis;
  std::vector<double> angles;
  std::vector<double> power;  ///< range-major
  bool clutter_removed = false;

  double at(std::size_t r, std::size_t a) const noexcept { return power[r * angles.size() + a]; }
};

inline PowerMap integrated_power(const RadarImage& image, double horizon_s) {
  const std::size_t count = detail::horizon_samples(horizon_s, image.fs(), image.n_time());
  PowerMap map{image.range_axis(), image.angles(), std::vector<double>(image.n_range() * image.n_angles(), 0.0),
               image.clutter_removed()};
  const std::size_t cells = map.power.size();
  for (std::size_t t = 0; t < count; ++t)
    for (std::size_t c = 0; c < cells; ++c) map.power[c] += std::norm(image.values()[t * cells + c]);
  return map;
}

/// Argmax of a power map inside the window. Ties go to the smaller range,
/// then to the smaller |theta|.
inline TargetLocation locate_target(const PowerMap& map, const SearchWindow& window = {}) {
  std::optional<TargetLocation> best;
  for (std::size_t r = 0; r < map.range_axis.size(); ++r) {
    if (!window.contains_range(map.range_axis[r])) continue;
    for (std::size_t a = 0; a < map.angles.size(); ++a) {
      if (!window.contains_angle(map.angles[a])) continue;
      const double p = map.at(r, a);
      const bool better = !best || p > best->power ||
                          (p == best->power && r == best->range_index &&
                           std::abs(map.angles[a]) < std::abs(best->angle_rad));
      if (better) best = TargetLocation{r, a, map.range_axis[r], map.angles[a], p, {}};
    }
  }
  detail::require(best.has_value(), "search window contains no image cell");
  if (!map.clutter_removed)
    best->warnings.emplace_back("localization ran on an image that still contains static clutter");
  return *best;
}

inline TargetLocation locate_target(const RadarImage& image, double horizon_s, const SearchWindow& window = {}) {
  return locate_target(integrated_power(image, horizon_s), window);
}

// Cube-domain route. Clutter removal commutes with beamforming, so the
// integrated power of every cell follows from the per-range-bin covariance of
// the clutter-free snapshots: sum_t |w^H s~|^2 = w^H (sum_t s~ s~^H) w.
// This avoids materialising the full T x R x angle image.

namespace detail {

inline std::vector<cdouble> channel_means(const RadarCube& cube, std::size_t r, std::size_t count) {
  std::vector<cdouble> mean(cube.n_channels(), cdouble{});
  const auto first = cube.snapshot(0, r);
  for (std::size_t t = 0; t < count; ++t) {
    const auto s = cube.snapshot(t, r);
    for (std::size_t n = 0; n < mean.size(); ++n) mean[n] += cdouble(s[n]) - cdouble(first[n]);
  }
  for (std::size_t n = 0; n < mean.size(); ++n) mean[n] = cdouble(first[n]) + mean[n] / static_cast<double>(count);
  return mean;
}

}  // namespace detail

inline PowerMap clutter_free_power_map(const RadarCube& cube, const BeamformerWeights& weights,
                                       double clutter_horizon_s, double integration_horizon_s) {
  weights.validate();
  detail::require(weights.taylor.size() == cube.n_channels(), "beamformer weight count must match channel count");
  const std::size_t n_clutter = detail::horizon_samples(clutter_horizon_s, cube.slow_time_fs(), cube.n_time());
  const std::size_t n_int = detail::horizon_samples(integration_horizon_s, cube.slow_time_fs(), cube.n_time());
  const std::size_t n_ch = cube.n_channels();
  const std::size_t n_ang = weights.angles_rad.size();
  const auto wconj = weights.conjugate_steering();

  PowerMap map{cube.range_axis(), weights.angles_rad, std::vector<double>(cube.n_range() * n_ang, 0.0), true};
  std::vector<cdouble> cov(n_ch * n_ch);
  std::vector<cdouble> d(n_ch);
  for (std::size_t r = 0; r < cube.n_range(); ++r) {
    const auto mean = detail::channel_means(cube, r, n_clutter);
    std::fill(cov.begin(), cov.end(), cdouble{});
    for (std::size_t t = 0; t < n_int; ++t) {
      const auto s = cube.snapshot(t, r);
      for (std::size_t n = 0; n < n_ch; ++n) d[n] = cdouble(s[n]) - mean[n];
      for (std::size_t i = 0; i < n_ch; ++i)
        for (std::size_t j = 0; j < n_ch; ++j) cov[i * n_ch + j] += d[i] * std::conj(d[j]);
    }
    for (std::size_t a = 0; a < n_ang; ++a) {
      const cdouble* wc = &wconj[a * n_ch];
      cdouble acc{};
      for (std::size_t i = 0; i < n_ch; ++i) {
        cdouble row{};
        for (std::size_t j = 0; j < n_ch; ++j) row += cov[i * n_ch + j] * std::conj(wc[j]);
        acc += wc[i] * row;
      }
      map.power[r * n_ang + a] = acc.real();
    }
  }
  return map;
}

/// Clutter-free slow-time series I(t, r, theta) of a single cell.
inline std::vector<cdouble> beamform_cell(const RadarCube& cube, const BeamformerWeights& weights,
                                          std::size_t range_index, std::size_t angle_index,
                                          double clutter_horizon_s) {
  weights.validate();
  detail::require(weights.taylor.size() == cube.n_channels(), "beamformer weight count must match channel count");
  detail::require(range_index < cube.n_range() && angle_index < weights.angles_rad.size(),
                  "cell index outside the image grid");
  const std::size_t n_ch = cube.n_channels();
  const auto wconj = weights.conjugate_steering();
  const cdouble* wc = &wconj[angle_index * n_ch];

  std::vector<cdouble> series(cube.n_time());
  for (std::size_t t = 0; t < cube.n_time(); ++t) {
    const auto s = cube.snapshot(t, range_index);
    cdouble acc{};
    for (std::size_t n = 0; n < n_ch; ++n) acc += wc[n] * cdouble(s[n]);
    series[t] = acc;
  }
  const std::size_t count = detail::horizon_samples(clutter_horizon_s, cube.slow_time_fs(), cube.n_time());
  cdouble mean{};
  for (std::size_t t = 0; t < count; ++t) mean += series[t] - series[0];
  mean = series[0] + mean / static_cast<double>(count);
  for (auto& v : series) v -= mean;
  return series;
}

}  // namespace radar_ibi
