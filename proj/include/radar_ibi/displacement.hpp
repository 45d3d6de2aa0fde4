#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/imaging.hpp"
#include "radar_ibi/trace.hpp"

namespace radar_ibi {

/// 1-D phase unwrapping: whenever consecutive samples jump by more than pi,
/// shift the remainder of the sequence by the multiple of 2 pi that brings
/// the jump back into [-pi, pi].
inline std::vector<double> unwrap_phase(std::span<const double> phase) {
  std::vector<double> out(phase.begin(), phase.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < phase.size(); ++i) {
    const double jump = phase[i] - phase[i - 1];
    if (std::abs(jump) > std::numbers::pi) {
      double wrapped = std::remainder(jump, 2.0 * std::numbers::pi);
      if (wrapped == -std::numbers::pi && jump > 0) wrapped = std::numbers::pi;
      offset += wrapped - jump;
    }
    out[i] = phase[i] + offset;
  }
  return out;
}

/// d'(t) = (lambda / 4 pi) unwrap(arg I(t)).
inline DisplacementTrace phase_displacement(std::span<const cdouble> cell, double fs, double wavelength) {
  bool any = false;
  for (const auto& v : cell) any = any || v != cdouble{};
  detail::require<DegenerateInput>(any, "cell signal is identically zero; its phase is undefined");
  std::vector<double> phase(cell.size());
  for (std::size_t i = 0; i < cell.size(); ++i) phase[i] = std::arg(cell[i]);
  auto unwrapped = unwrap_phase(phase);
  const double scale = wavelength / (4.0 * std::numbers::pi);
  for (double& v : unwrapped) v *= scale;
  return DisplacementTrace{std::move(unwrapped), fs, 0.0, false};
}

inline DisplacementTrace extract_phase_displacement(const RadarImage& image, const TargetLocation& loc) {
  detail::require(loc.range_index < image.n_range() && loc.angle_index < image.n_angles(),
                  "target location is not on the image grid");
  const auto cell = image.cell(loc.range_index, loc.angle_index);
  return phase_displacement(cell, image.fs(), image.wavelength());
}

struct DetrendConfig {
  double sigma_s = 1.0;
  double truncation = 4.0;  ///< kernel half-support in multiples of sigma

  void validate() const {
    detail::require(sigma_s > 0.0 && std::isfinite(sigma_s), "gaussian sigma must be positive");
    detail::require(truncation >= 3.0, "gaussian truncation must be at least 3 sigma");
  }
};

/// Sampled Gaussian g(t), truncated at +-truncation*sigma and normalized to unit sum.
inline std::vector<double> gaussian_kernel(double sigma_samples, double truncation) {
  const auto half = static_cast<std::size_t>(std::ceil(truncation * sigma_samples));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(half);
    k[i] = std::exp(-0.5 * x * x / (sigma_samples * sigma_samples));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Convolution with an odd-length centred kernel; the signal is extended by
/// mirror reflection about its end samples (x[-1] = x[0]).
inline std::vector<double> convolve_reflect(std::span<const double> x, std::span<const double> kernel) {
  const std::size_t n = x.size();
  const std::size_t half = kernel.size() / 2;
  detail::require(n > half, "signal is shorter than the kernel half-width");
  auto sample = [&](long i) {
    const long len = static_cast<long>(n);
    if (i < 0) i = -i - 1;
    if (i >= len) i = 2 * len - i - 1;
    return x[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const long base = static_cast<long>(i) - static_cast<long>(half);
    for (std::size_t k = 0; k < kernel.size(); ++k) acc += kernel[k] * sample(base + static_cast<long>(k));
    out[i] = acc;
  }
  return out;
}

inline DisplacementTrace gaussian_smooth(const DisplacementTrace& trace, double sigma_s, double truncation = 4.0) {
  DetrendConfig{sigma_s, truncation}.validate();
  const auto kernel = gaussian_kernel(sigma_s * trace.fs, truncation);
  detail::require(trace.size() > kernel.size(), "trace of " + std::to_string(trace.size()) +
                                                    " samples is shorter than the " +
                                                    std::to_string(kernel.size()) + "-sample kernel");
  DisplacementTrace out = trace;
  out.samples = convolve_reflect(trace.samples, kernel);
  return out;
}

/// d(t) = d'(t) - (g * d')(t).
inline DisplacementTrace gaussian_detrend(const DisplacementTrace& trace, const DetrendConfig& cfg = {}) {
  cfg.validate();
  const auto trend = gaussian_smooth(trace, cfg.sigma_s, cfg.truncation);
  DisplacementTrace out = trace;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] -= trend.samples[i];
  out.detrended = true;
  return out;
}

}  // namespace radar_ibi
