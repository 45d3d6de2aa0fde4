#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/spectral.hpp"
#include "radar_ibi/trace.hpp"

namespace radar_ibi {

enum class FilterKind { high_pass, band_pass };

struct FilterSpec {
  FilterKind kind = FilterKind::high_pass;
  std::vector<double> cutoffs_hz;
  int order = 4;
  bool zero_phase = true;

  static FilterSpec high_pass(double f_c, int order = 4) { return {FilterKind::high_pass, {f_c}, order, true}; }
  static FilterSpec band_pass(double lo, double hi, int order = 4) {
    return {FilterKind::band_pass, {lo, hi}, order, true};
  }

  void validate(double fs) const {
    detail::require(order >= 1, "filter order must be at least 1");
    const std::size_t expected = kind == FilterKind::high_pass ? 1 : 2;
    detail::require(cutoffs_hz.size() == expected, "filter needs " + std::to_string(expected) + " cutoff(s)");
    for (double c : cutoffs_hz)
      detail::require(c > 0.0 && c < fs / 2.0, "cutoff " + std::to_string(c) + " Hz must lie strictly inside (0, " +
                                                   std::to_string(fs / 2.0) + ") Hz");
    if (kind == FilterKind::band_pass)
      detail::require(cutoffs_hz[0] < cutoffs_hz[1], "band-pass cutoffs must be increasing");
  }
};

/// Second-order section, a0 = 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z) const {
    const auto zi = 1.0 / z;
    return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
  }
};

namespace detail {

/// Butterworth high- or low-pass by bilinear transform with pre-warping.
inline std::vector<Biquad> butterworth(int order, double f_c, double fs, bool high_pass) {
  using cd = std::complex<double>;
  const double two_fs = 2.0 * fs;
  const double wc = two_fs * std::tan(std::numbers::pi * f_c / fs);
  const cd gain_point = high_pass ? cd(-1.0, 0.0) : cd(1.0, 0.0);
  const double zero = high_pass ? 1.0 : -1.0;

  auto digital_pole = [&](int k) {
    const cd proto = std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order));
    const cd s = high_pass ? wc / proto : wc * proto;
    return (two_fs + s) / (two_fs - s);
  };

  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const cd p = digital_pole(k);
    Biquad q{1.0, -2.0 * zero, 1.0, -2.0 * p.real(), std::norm(p)};
    const double g = std::abs(q.response(gain_point));
    q.b0 /= g;
    q.b1 /= g;
    q.b2 /= g;
    sections.push_back(q);
  }
  if (order % 2 == 1) {
    const double p = digital_pole(order / 2).real();
    Biquad q{1.0, -zero, 0.0, -p, 0.0};
    const double g = std::abs(q.response(gain_point));
    q.b0 /= g;
    q.b1 /= g;
    sections.push_back(q);
  }
  return sections;
}

}  // namespace detail

inline std::vector<Biquad> design_filter(const FilterSpec& spec, double fs) {
  spec.validate(fs);
  if (spec.kind == FilterKind::high_pass) return detail::butterworth(spec.order, spec.cutoffs_hz[0], fs, true);
  auto sections = detail::butterworth(spec.order, spec.cutoffs_hz[0], fs, true);
  const auto low = detail::butterworth(spec.order, spec.cutoffs_hz[1], fs, false);
  sections.insert(sections.end(), low.begin(), low.end());
  return sections;
}

inline std::complex<double> frequency_response(std::span<const Biquad> sections, double f, double fs) {
  const auto z = std::polar(1.0, 2.0 * std::numbers::pi * f / fs);
  std::complex<double> h = 1.0;
  for (const auto& s : sections) h *= s.response(z);
  return h;
}

/// Transposed direct-form II cascade. `state` holds (z1, z2) per section.
inline std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x,
                                   std::vector<double> state = {}) {
  if (state.empty()) state.assign(2 * sections.size(), 0.0);
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const auto& q = sections[s];
    double z1 = state[2 * s];
    double z2 = state[2 * s + 1];
    for (double& v : y) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
  return y;
}

/// Section states that make the cascade start in steady state for a unit
/// constant input.
inline std::vector<double> steady_state(std::span<const Biquad> sections) {
  std::vector<double> state;
  double u = 1.0;
  for (const auto& q : sections) {
    const double y = u * (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    state.push_back(y - q.b0 * u);
    state.push_back(q.b2 * u - q.a2 * y);
    u = y;
  }
  return state;
}

/// Forward-backward filtering with odd extension at both ends.
inline std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x, std::size_t padlen) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  padlen = std::min(padlen, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = steady_state(sections);
  auto scaled = [&](double s) {
    auto st = zi;
    for (double& v : st) v *= s;
    return st;
  };
  auto fwd = sosfilt(sections, ext, scaled(ext.front()));
  std::reverse(fwd.begin(), fwd.end());
  auto bwd = sosfilt(sections, fwd, scaled(fwd.front()));
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(padlen), bwd.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

/// Butterworth filtering of a displacement trace. With `zero_phase` the
/// filter runs forward and backward, doubling the attenuation in dB and
/// cancelling the group delay.
inline DisplacementTrace apply_filter(const DisplacementTrace& trace, const FilterSpec& spec) {
  trace.validate();
  const auto sections = design_filter(spec, trace.fs);
  DisplacementTrace out = trace;
  if (trace.empty()) return out;
  if (spec.zero_phase) {
    const double lowest = *std::min_element(spec.cutoffs_hz.begin(), spec.cutoffs_hz.end());
    const auto padlen = std::max<std::size_t>(3 * (2 * sections.size() + 1),
                                              static_cast<std::size_t>(std::ceil(3.0 * trace.fs / lowest)));
    out.samples = filtfilt(sections, trace.samples, padlen);
  } else {
    out.samples = sosfilt(sections, trace.samples);
  }
  return out;
}

/// Conventional comparison filters: (1) a band-pass covering only the
/// heartbeat fundamental band, (2) a fixed literature band-pass.
inline std::vector<FilterSpec> baseline_bandpass_specs(const SpeciesBand& band, double literature_lo_hz = 0.8,
                                                       double literature_hi_hz = 2.0, int order = 4) {
  band.validate();
  return {FilterSpec::band_pass(band.f_lo, band.f_hi, order),
          FilterSpec::band_pass(literature_lo_hz, literature_hi_hz, order)};
}

}  // namespace radar_ibi
