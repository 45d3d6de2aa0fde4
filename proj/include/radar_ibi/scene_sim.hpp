#pragma once

// Synthetic chest-displacement and multi-channel radar signal generator.
//
// The displacement model is respiration plus a heartbeat pulse train:
//
//   d(t) = A_r |sin(pi f_r t)|^k + sum_j A_h hann((t - o_j) / w)
//
// where the |sin|^k respiration has period 1/f_r and harmonics at every
// multiple of f_r, and o_j are the pulse onsets (cumulative sums of the
// inter-beat intervals). The radar model places a single point scatterer at
// (range, angle) whose phase follows 4 pi (r + d(t)) / lambda, spreads it over
// neighbouring range bins with a sinc point-spread profile, adds static
// reflectors and circular complex white noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/radar_cube.hpp"
#include "radar_ibi/trace.hpp"

namespace radar_ibi {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct PhysioModel {
  double resp_freq_hz = 0.25;
  double resp_amp_m = 4e-3;  ///< peak-to-peak respiratory excursion
  double resp_shape_exponent = 3.0;
  /// One entry means a constant interval. Otherwise consecutive intervals,
  /// with the last one held once the list is exhausted.
  std::vector<double> heart_ibi_s{60.0 / 70.0};
  double heart_amp_m = 0.2e-3;
  double heart_pulse_width_s = 0.14;

  void validate() const {
    detail::require(resp_freq_hz > 0.0, "respiration frequency must be positive");
    detail::require(resp_amp_m >= 0.0 && heart_amp_m >= 0.0, "amplitudes must be non-negative");
    detail::require(resp_shape_exponent > 0.0, "respiration shape exponent must be positive");
    detail::require(!heart_ibi_s.empty(), "heartbeat interval list must not be empty");
    for (double ibi : heart_ibi_s) detail::require(ibi > 0.0, "heartbeat intervals must be positive");
    detail::require(heart_pulse_width_s > 0.0, "heartbeat pulse width must be positive");
  }
};

struct ArrayGeometry {
  std::size_t n_tx = 3;
  std::size_t n_rx = 4;
  double wavelength_m = 3.8e-3;

  std::size_t n_virtual() const noexcept { return n_tx * n_rx; }
  double virtual_spacing_m() const noexcept { return wavelength_m / 2.0; }

  void validate() const {
    detail::require(n_tx >= 1 && n_rx >= 1, "array needs at least one transmitter and one receiver");
    detail::require(wavelength_m > 0.0, "wavelength must be positive");
  }
};

/// Static reflector: contributes a time-invariant term.
struct Reflector {
  double range_m = 0.0;
  double angle_rad = 0.0;
  cdouble amplitude{};
};

inline double range_resolution_for_bandwidth(double bandwidth_hz) {
  detail::require(bandwidth_hz > 0.0, "bandwidth must be positive");
  return kSpeedOfLight / (2.0 * bandwidth_hz);
}

struct SceneSpec {
  double target_range_m = 0.7;
  double target_angle_rad = 0.0;
  double target_amplitude = 1.0;
  PhysioModel physio;
  std::vector<Reflector> clutter;
  /// Per-channel SNR at the target range bin; +inf disables noise.
  double noise_snr_db = 30.0;
  double duration_s = 120.0;
  double slow_time_fs_hz = 100.0;
  std::size_t range_bins = 32;
  double range_resolution_m = range_resolution_for_bandwidth(3.5e9);
  double range_start_m = 0.0;
  /// Half-width, in bins, of the sinc range point-spread profile.
  std::size_t leakage_half_width = 2;
  std::uint64_t seed = 0;

  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(std::floor(duration_s * slow_time_fs_hz + 1e-9));
  }
  std::vector<double> range_axis() const {
    std::vector<double> axis(range_bins);
    for (std::size_t i = 0; i < range_bins; ++i)
      axis[i] = range_start_m + static_cast<double>(i) * range_resolution_m;
    return axis;
  }
  bool noiseless() const noexcept { return !std::isfinite(noise_snr_db); }

  void validate() const {
    physio.validate();
    detail::require(slow_time_fs_hz > 0.0 && duration_s > 0.0, "duration and sampling frequency must be positive");
    detail::require(sample_count() >= 2, "scene must contain at least two slow-time samples");
    detail::require(range_bins >= 1 && range_resolution_m > 0.0, "range window must be non-empty");
    const double window_end = range_start_m + static_cast<double>(range_bins) * range_resolution_m;
    detail::require(target_range_m >= range_start_m && target_range_m < window_end,
                    "target range lies outside the range window");
    detail::require(std::abs(target_angle_rad) < std::numbers::pi / 2, "target angle must lie in (-pi/2, pi/2)");
    detail::require(target_amplitude > 0.0, "target amplitude must be positive");
    detail::require(!std::isnan(noise_snr_db), "noise SNR must not be NaN");
  }
};

/// Displacement ground truth: the sampled trace and the exact pulse onsets.
struct SyntheticDisplacement {
  DisplacementTrace trace;
  std::vector<double> onsets_s;

  /// Adjacent differences of the recorded onsets.
  std::vector<double> intervals_s() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < onsets_s.size(); ++i) out.push_back(onsets_s[i] - onsets_s[i - 1]);
    return out;
  }
};

inline std::vector<double> heartbeat_onsets(const PhysioModel& physio, double duration_s) {
  std::vector<double> onsets;
  double t = 0.0;
  for (std::size_t j = 0;; ++j) {
    t += physio.heart_ibi_s[std::min(j, physio.heart_ibi_s.size() - 1)];
    if (t >= duration_s) break;
    onsets.push_back(t);
  }
  return onsets;
}

inline SyntheticDisplacement synth_displacement(const PhysioModel& physio, double fs_hz, double duration_s) {
  detail::require(fs_hz > 0.0 && std::isfinite(fs_hz), "sampling frequency must be positive");
  detail::require(duration_s > 0.0 && std::isfinite(duration_s), "duration must be positive");
  physio.validate();

  const auto n = static_cast<std::size_t>(std::floor(duration_s * fs_hz + 1e-9));
  SyntheticDisplacement out;
  out.trace.fs = fs_hz;
  out.trace.samples.assign(n, 0.0);
  out.onsets_s = heartbeat_onsets(physio, duration_s);

  if (physio.resp_amp_m > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs_hz;
      const double s = std::abs(std::sin(std::numbers::pi * physio.resp_freq_hz * t));
      out.trace.samples[i] = physio.resp_amp_m * std::pow(s, physio.resp_shape_exponent);
    }
  }
  if (physio.heart_amp_m > 0.0) {
    const double w = physio.heart_pulse_width_s;
    for (double onset : out.onsets_s) {
      const auto first = static_cast<std::size_t>(std::ceil(onset * fs_hz));
      for (std::size_t i = first; i < n; ++i) {
        const double u = (static_cast<double>(i) / fs_hz - onset) / w;
        if (u > 1.0) break;
        out.trace.samples[i] += physio.heart_amp_m * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
      }
    }
  }
  return out;
}

namespace detail {

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

struct RangeSpread {
  std::size_t centre = 0;
  std::vector<std::pair<std::size_t, double>> taps;
};

inline RangeSpread range_spread(const SceneSpec& scene, double range_m) {
  const double pos = (range_m - scene.range_start_m) / scene.range_resolution_m;
  const auto last = static_cast<double>(scene.range_bins - 1);
  RangeSpread spread;
  spread.centre = static_cast<std::size_t>(std::clamp(std::round(pos), 0.0, last));
  const auto half = static_cast<long>(scene.leakage_half_width);
  for (long db = -half; db <= half; ++db) {
    const long b = static_cast<long>(spread.centre) + db;
    if (b < 0 || b >= static_cast<long>(scene.range_bins)) continue;
    spread.taps.emplace_back(static_cast<std::size_t>(b), sinc(static_cast<double>(b) - pos));
  }
  return spread;
}

inline std::vector<cdouble> steering(std::size_t n_channels, double angle_rad) {
  std::vector<cdouble> s(n_channels);
  for (std::size_t n = 0; n < n_channels; ++n)
    s[n] = std::polar(1.0, std::numbers::pi * static_cast<double>(n) * std::sin(angle_rad));
  return s;
}

}  // namespace detail

/// Per-channel noise variance implied by the scene SNR at the target bin.
inline double noise_variance(const SceneSpec& scene) {
  if (scene.noiseless()) return 0.0;
  const auto spread = detail::range_spread(scene, scene.target_range_m);
  double centre_gain = 0.0;
  for (const auto& [bin, w] : spread.taps)
    if (bin == spread.centre) centre_gain = w;
  const double signal_power = std::pow(scene.target_amplitude * centre_gain, 2);
  return signal_power / std::pow(10.0, scene.noise_snr_db / 10.0);
}

struct SimulatedScene {
  RadarCube cube;
  SyntheticDisplacement truth;
  std::size_t target_bin = 0;
};

inline SimulatedScene simulate_scene(const SceneSpec& scene, const ArrayGeometry& geom) {
  scene.validate();
  geom.validate();

  SimulatedScene out;
  out.truth = synth_displacement(scene.physio, scene.slow_time_fs_hz, scene.duration_s);
  const std::size_t n_t = out.truth.trace.size();
  const std::size_t n_ch = geom.n_virtual();
  out.cube = RadarCube(n_t, scene.range_axis(), geom.n_tx, geom.n_rx, scene.slow_time_fs_hz, geom.wavelength_m);

  const double k = 4.0 * std::numbers::pi / geom.wavelength_m;
  const auto target = detail::range_spread(scene, scene.target_range_m);
  out.target_bin = target.centre;
  const auto target_steer = detail::steering(n_ch, scene.target_angle_rad);

  // Static part: clutter, summed per (range, channel).
  std::vector<cdouble> static_part(scene.range_bins * n_ch, cdouble{});
  for (const auto& refl : scene.clutter) {
    const auto spread = detail::range_spread(scene, refl.range_m);
    const auto steer = detail::steering(n_ch, refl.angle_rad);
    const cdouble base = refl.amplitude * std::polar(1.0, k * refl.range_m);
    for (const auto& [bin, w] : spread.taps)
      for (std::size_t n = 0; n < n_ch; ++n) static_part[bin * n_ch + n] += w * base * steer[n];
  }

  const double sigma = std::sqrt(noise_variance(scene) / 2.0);
  std::mt19937_64 rng(scene.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<cdouble> row(scene.range_bins * n_ch);
  for (std::size_t t = 0; t < n_t; ++t) {
    std::copy(static_part.begin(), static_part.end(), row.begin());
    const cdouble echo =
        scene.target_amplitude * std::polar(1.0, k * (scene.target_range_m + out.truth.trace.samples[t]));
    for (const auto& [bin, w] : target.taps)
      for (std::size_t n = 0; n < n_ch; ++n) row[bin * n_ch + n] += w * echo * target_steer[n];
    for (std::size_t r = 0; r < scene.range_bins; ++r) {
      for (std::size_t n = 0; n < n_ch; ++n) {
        cdouble v = row[r * n_ch + n];
        if (sigma > 0.0) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          v += cdouble(sigma * re, sigma * im);
        }
        out.cube.at(t, r, n) = cfloat(static_cast<float>(v.real()), static_cast<float>(v.imag()));
      }
    }
  }
  return out;
}

inline RadarCube synth_radar_cube(const SceneSpec& scene, const ArrayGeometry& geom) {
  return simulate_scene(scene, geom).cube;
}

/// Human measurement setup: 79 GHz, 3 x 4 MIMO, 100 Hz slow time, 2 min record.
inline SceneSpec human_default_scene() { return SceneSpec{}; }

/// Chimpanzee setup: 145.56 Hz slow time, 1 min record, 100 bpm.
inline SceneSpec chimp_default_scene() {
  SceneSpec s;
  s.slow_time_fs_hz = 145.56;
  s.duration_s = 60.0;
  s.physio.resp_freq_hz = 0.3;
  s.physio.resp_amp_m = 3e-3;
  s.physio.heart_ibi_s = {0.6};
  return s;
}

}  // namespace radar_ibi
