#pragma once

// PSD-driven high-pass cutoff selection.
//
// The heartbeat fundamental usually sits among respiratory harmonics, while
// its second harmonic stands clear. The cutoff is therefore placed at the
// spectral trough just below the second harmonic: low enough to keep the
// heartbeat harmonics, high enough to reject respiration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/fft.hpp"
#include "radar_ibi/trace.hpp"

namespace radar_ibi {

/// D(f) on [0, fs/2] with uniform spacing.
struct Psd {
  std::vector<double> freqs;
  std::vector<double> power;
  double smoothing_bw = 0.0;

  double resolution() const noexcept { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

/// |FFT|^2 / (fs n) of the full record, bins 0 .. n/2.
inline Psd periodogram(const DisplacementTrace& trace) {
  detail::require(!trace.empty(), "cannot estimate the spectrum of an empty trace");
  trace.validate();
  const auto spectrum = rfft(trace.samples);
  const double n = static_cast<double>(trace.size());
  Psd psd;
  psd.freqs.resize(spectrum.size());
  psd.power.resize(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    psd.freqs[k] = static_cast<double>(k) * trace.fs / n;
    psd.power[k] = std::norm(spectrum[k]) / (trace.fs * n);
  }
  return psd;
}

/// Moving average over an odd number of bins closest to `bandwidth_hz`,
/// mirrored about the first and last bins.
inline Psd smooth_psd(Psd psd, double bandwidth_hz) {
  const double df = psd.resolution();
  detail::require(df > 0.0, "spectrum needs at least two bins to be smoothed");
  detail::require(bandwidth_hz >= df * (1.0 - 1e-9),
                  "smoothing bandwidth " + std::to_string(bandwidth_hz) + " Hz is below the " +
                      std::to_string(df) + " Hz frequency resolution");
  auto width = static_cast<std::size_t>(std::llround(bandwidth_hz / df));
  if (width % 2 == 0) ++width;
  const long half = static_cast<long>(width / 2);
  const long len = static_cast<long>(psd.power.size());
  auto mirrored = [&](long i) {
    while (i < 0 || i >= len) {
      if (i < 0) i = -i;
      if (i >= len) i = 2 * (len - 1) - i;
    }
    return psd.power[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(psd.power.size());
  for (long k = 0; k < len; ++k) {
    double acc = 0.0;
    for (long j = -half; j <= half; ++j) acc += mirrored(k + j);
    out[static_cast<std::size_t>(k)] = acc / static_cast<double>(width);
  }
  psd.power = std::move(out);
  psd.smoothing_bw = bandwidth_hz;
  return psd;
}

/// Periodogram of a detrended trace smoothed over `smoothing_bw_hz`.
inline Psd estimate_psd(const DisplacementTrace& trace, double smoothing_bw_hz = 0.1) {
  return smooth_psd(periodogram(trace), smoothing_bw_hz);
}

/// Typical heart-rate range of a species.
struct SpeciesBand {
  std::string name;
  double f_lo = 1.0;
  double f_hi = 1.7;

  static SpeciesBand human() { return {"human", 1.0, 1.7}; }
  static SpeciesBand chimpanzee() { return {"chimpanzee", 1.5, 2.2}; }

  void validate() const {
    detail::require(f_lo > 0.0 && f_lo < f_hi, "species band needs 0 < f_lo < f_hi");
  }
};

struct HarmonicEstimate {
  double f_h1 = 0.0;
  double f_h2 = 0.0;
};

/// Second heartbeat harmonic: the PSD maximum within [2 f_lo, 2 f_hi].
inline HarmonicEstimate identify_second_harmonic(const Psd& psd, const SpeciesBand& band) {
  band.validate();
  detail::require(!psd.freqs.empty() && psd.freqs.front() <= band.f_lo && psd.freqs.back() >= 2.0 * band.f_hi,
                  "species band [" + std::to_string(band.f_lo) + ", " + std::to_string(2.0 * band.f_hi) +
                      "] Hz lies outside the spectrum support");
  const double tol = 1e-9 * psd.resolution();
  std::size_t best = psd.freqs.size();
  for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
    const double f = psd.freqs[k];
    if (f < 2.0 * band.f_lo - tol || f > 2.0 * band.f_hi + tol) continue;
    if (best == psd.freqs.size() || psd.power[k] > psd.power[best]) best = k;
  }
  detail::require(best < psd.freqs.size(), "no spectrum bin falls in the doubled species band");
  const double f_h2 = psd.freqs[best];
  return {f_h2 / 2.0, f_h2};
}

struct CutoffSelection {
  double f_h1 = 0.0;
  double f_h2 = 0.0;
  std::vector<double> candidates;
  double f_c = 0.0;
  std::vector<std::string> warnings;
  bool fallback = false;
};

/// Discrete local minima of the smoothed PSD strictly below `f_h2`; the one
/// nearest to `f_h2` (lower frequency on ties) becomes the cutoff.
inline CutoffSelection find_cutoff(const Psd& psd, double f_h2) {
  detail::require(psd.smoothing_bw > 0.0, "cutoff search needs a smoothed spectrum");
  detail::require(f_h2 > 0.0, "second harmonic frequency must be positive");
  CutoffSelection sel;
  sel.f_h2 = f_h2;
  sel.f_h1 = f_h2 / 2.0;
  const auto& p = psd.power;
  for (std::size_t k = 1; k + 1 < p.size() && psd.freqs[k] < f_h2; ++k) {
    const bool trough = p[k] <= p[k - 1] && p[k] <= p[k + 1] && (p[k] < p[k - 1] || p[k] < p[k + 1]);
    if (trough) sel.candidates.push_back(psd.freqs[k]);
  }
  if (sel.candidates.empty())
    throw NoTrough("smoothed spectrum has no trough below " + std::to_string(f_h2) + " Hz");
  // Candidates are ascending, so a strict comparison keeps the lower one on ties.
  sel.f_c = sel.candidates.front();
  for (double c : sel.candidates)
    if (std::abs(f_h2 - c) < std::abs(f_h2 - sel.f_c)) sel.f_c = c;
  if (!(sel.f_c < sel.f_h2)) throw Error("cutoff selection invariant violated: f_c >= f_h2");
  return sel;
}

/// Cutoff used when the spectrum offers no trough: midway between the top of
/// the fundamental band and the bottom of the doubled band.
inline double fallback_cutoff(const SpeciesBand& band) { return 0.5 * (band.f_hi + 2.0 * band.f_lo); }

/// Full selection: harmonic identification, trough search, and fallback.
inline CutoffSelection select_cutoff(const Psd& psd, const SpeciesBand& band) {
  const auto harmonic = identify_second_harmonic(psd, band);
  try {
    return find_cutoff(psd, harmonic.f_h2);
  } catch (const NoTrough& e) {
    CutoffSelection sel;
    sel.f_h1 = harmonic.f_h1;
    sel.f_h2 = harmonic.f_h2;
    sel.f_c = fallback_cutoff(band);
    sel.fallback = true;
    sel.warnings.push_back(std::string(e.what()) + "; using fallback cutoff " + std::to_string(sel.f_c) + " Hz");
    return sel;
  }
}

}  // namespace radar_ibi
