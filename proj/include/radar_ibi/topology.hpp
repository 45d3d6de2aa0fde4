#pragma once

// Topology-method IBI estimation: typed waveform feature points, pairing of
// repeated features, and similarity gating.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radar_ibi/errors.hpp"
#include "radar_ibi/spectral.hpp"
#include "radar_ibi/trace.hpp"

namespace radar_ibi {

enum class FeatureKind {
  peak,
  trough,
  infl_rise_accel,  ///< slope minimum while rising
  infl_rise_decel,  ///< slope maximum while rising
  infl_fall_accel,  ///< slope maximum while falling
  infl_fall_decel,  ///< slope minimum while falling
};

inline std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::peak: return "peak";
    case FeatureKind::trough: return "trough";
    case FeatureKind::infl_rise_accel: return "infl_rise_accel";
    case FeatureKind::infl_rise_decel: return "infl_rise_decel";
    case FeatureKind::infl_fall_accel: return "infl_fall_accel";
    case FeatureKind::infl_fall_decel: return "infl_fall_decel";
  }
  return "?";
}

struct FeaturePoint {
  double time = 0.0;
  FeatureKind kind = FeatureKind::peak;
  double amplitude = 0.0;
};

struct FeatureSequence {
  std::vector<FeaturePoint> points;
  double source_fs = 0.0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  const FeaturePoint& operator[](std::size_t i) const { return points[i]; }
};

namespace detail {

/// Vertex offset of the parabola through (-1, a), (0, b), (1, c), clamped to half a sample.
inline double parabolic_offset(double a, double b, double c) {
  const double den = a - 2.0 * b + c;
  if (den == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

inline double sample_linear(const DisplacementTrace& trace, double t) {
  const double pos = (t - trace.t0) * trace.fs;
  const auto last = static_cast<double>(trace.size() - 1);
  const double p = std::clamp(pos, 0.0, last);
  const auto i = static_cast<std::size_t>(std::floor(p));
  if (i + 1 >= trace.size()) return trace.samples.back();
  const double frac = p - static_cast<double>(i);
  return trace.samples[i] + frac * (trace.samples[i + 1] - trace.samples[i]);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Sign changes of `y`, skipping exact zeros. Calls `emit(center, before_sign)`
/// with the index midway across any run of zeros.
template <class F>
void for_each_sign_change(const std::vector<double>& y, F&& emit) {
  int last_sign = 0;
  std::size_t last_index = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const int s = sign(y[j]);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) emit((last_index + 1 + j) / 2, last_sign);
    last_sign = s;
    last_index = j;
  }
}

}  // namespace detail

/// Peaks and troughs from sign changes of the first difference; inflections
/// from sign changes of the second difference, typed by the slope sign and
/// whether the slope reaches a maximum or a minimum. Times are refined by a
/// parabolic vertex fit.
inline FeatureSequence extract_features(const DisplacementTrace& trace) {
  detail::require(trace.size() >= 3, "feature extraction needs at least 3 samples, got " +
                                         std::to_string(trace.size()));
  trace.validate();
  const auto& x = trace.samples;
  const std::size_t n = x.size();
  std::vector<double> d1(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d1[i] = x[i + 1] - x[i];
  std::vector<double> d2(n - 2);
  for (std::size_t i = 0; i + 1 < d1.size(); ++i) d2[i] = d1[i + 1] - d1[i];

  FeatureSequence seq;
  seq.source_fs = trace.fs;

  // d1[j] spans samples j and j+1, so a sign change with d1 index c is an
  // extremum at sample c.
  detail::for_each_sign_change(d1, [&](std::size_t c, int before) {
    if (c == 0 || c + 1 >= n) return;
    const double delta = detail::parabolic_offset(x[c - 1], x[c], x[c + 1]);
    const double t = trace.time(c) + delta / trace.fs;
    seq.points.push_back({t, before > 0 ? FeatureKind::peak : FeatureKind::trough, detail::sample_linear(trace, t)});
  });

  // d2[j] spans d1 indices j and j+1; an extremum of d1 at index c sits at
  // time index c + 1/2.
  detail::for_each_sign_change(d2, [&](std::size_t c, int before) {
    if (c == 0 || c + 1 >= d1.size()) return;
    const int slope = detail::sign(d1[c]);
    if (slope == 0) return;
    const bool slope_max = before > 0;
    FeatureKind kind;
    if (slope > 0)
      kind = slope_max ? FeatureKind::infl_rise_decel : FeatureKind::infl_rise_accel;
    else
      kind = slope_max ? FeatureKind::infl_fall_accel : FeatureKind::infl_fall_decel;
    const double delta = detail::parabolic_offset(d1[c - 1], d1[c], d1[c + 1]);
    const double t = trace.time(c) + (0.5 + delta) / trace.fs;
    seq.points.push_back({t, kind, detail::sample_linear(trace, t)});
  });

  std::stable_sort(seq.points.begin(), seq.points.end(),
                   [](const FeaturePoint& a, const FeaturePoint& b) { return a.time < b.time; });
  auto dup = std::unique(seq.points.begin(), seq.points.end(),
                         [](const FeaturePoint& a, const FeaturePoint& b) { return a.time == b.time; });
  seq.points.erase(dup, seq.points.end());
  return seq;
}

namespace detail {

inline std::optional<double> try_topo_similarity(const FeatureSequence& seq, std::size_t m, std::size_t n,
                                                 std::size_t window) {
  const std::size_t back = (window - 1) / 2;
  if (m < back || n < back) return std::nullopt;
  const std::size_t sm = m - back;
  const std::size_t sn = n - back;
  if (sm + window > seq.size() || sn + window > seq.size()) return std::nullopt;
  std::size_t agree = 0;
  for (std::size_t k = 0; k < window; ++k) agree += seq[sm + k].kind == seq[sn + k].kind;
  return static_cast<double>(agree) / static_cast<double>(window);
}

enum class CorrStatus { ok, out_of_range, degenerate };

inline std::pair<CorrStatus, double> try_local_corr(const DisplacementTrace& trace, double t_m, double t_n,
                                                    double seg_len) {
  const double half = seg_len / 2.0;
  const double first = trace.t0;
  const double last = trace.time(trace.size() - 1);
  const double tol = 1e-9 / trace.fs;
  for (double t : {t_m, t_n})
    if (t - half < first - tol || t + half > last + tol) return {CorrStatus::out_of_range, 0.0};
  const auto len = std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(seg_len * trace.fs)) + 1);
  std::vector<double> a(len), b(len);
  const double step = seg_len / static_cast<double>(len - 1);
  for (std::size_t k = 0; k < len; ++k) {
    const double off = -half + step * static_cast<double>(k);
    a[k] = sample_linear(trace, t_m + off);
    b[k] = sample_linear(trace, t_n + off);
  }
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= static_cast<double>(len);
  mb /= static_cast<double>(len);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return {CorrStatus::degenerate, 0.0};
  return {CorrStatus::ok, std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0)};
}

}  // namespace detail

/// M(m, n): fraction of positions where the kind strings of two
/// `window`-long runs of feature points agree. The run around m starts at
/// m - (window - 1) / 2.
inline double topo_similarity(const FeatureSequence& seq, std::size_t m, std::size_t n, std::size_t window) {
  detail::require(window >= 1, "similarity window must hold at least one feature point");
  const auto r = detail::try_topo_similarity(seq, m, n, window);
  if (!r)
    throw OutOfRange("window of " + std::to_string(window) + " feature points around indices " + std::to_string(m) +
                     " and " + std::to_string(n) + " exceeds a sequence of " + std::to_string(seq.size()));
  return *r;
}

/// C(m, n): Pearson correlation of the waveform segments of length `seg_len`
/// centred at t_m and t_n, both linearly resampled on the same offset grid.
inline double local_corr(const DisplacementTrace& trace, double t_m, double t_n, double seg_len) {
  detail::require(seg_len > 0.0, "correlation segment length must be positive");
  detail::require(trace.size() >= 2, "correlation needs a trace of at least 2 samples");
  const auto [status, value] = detail::try_local_corr(trace, t_m, t_n, seg_len);
  if (status == detail::CorrStatus::out_of_range)
    throw OutOfRange("correlation segment leaves the record");
  if (status == detail::CorrStatus::degenerate)
    throw DegenerateInput("correlation segment has zero variance");
  return value;
}

struct PairScore {
  std::size_t m = 0;
  std::size_t n = 0;
  double topo_similarity = 0.0;
  double local_corr = 0.0;
};

struct GateThresholds {
  double c0 = 0.8;
  double m0 = 0.8;

  void validate() const {
    detail::require(std::isfinite(c0) && std::isfinite(m0), "gate thresholds must be finite");
  }
};

struct IbiEntry {
  double time = 0.0;
  double interval = 0.0;
  PairScore score;
};

struct IbiSeries {
  std::vector<IbiEntry> entries;
  double coverage = 0.0;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

struct IbiBounds {
  double min_s = 0.0;
  double max_s = 0.0;

  /// Reciprocal of the species band, widened by `margin` on both sides.
  static IbiBounds from_band(const SpeciesBand& band, double margin = 0.2) {
    band.validate();
    return {(1.0 - margin) / band.f_hi, (1.0 + margin) / band.f_lo};
  }
  void validate() const { detail::require(min_s > 0.0 && min_s < max_s, "IBI bounds need 0 < min < max"); }
};

struct TopologyConfig {
  std::size_t window = 9;
  double seg_len_s = 0.8;
  GateThresholds thresholds;
};

/// Union length of [start, end] intervals divided by `record_length`.
inline double covered_fraction(std::vector<std::pair<double, double>> spans, double record_length) {
  if (spans.empty() || record_length <= 0.0) return 0.0;
  std::sort(spans.begin(), spans.end());
  double total = 0.0;
  double lo = spans.front().first, hi = spans.front().second;
  for (const auto& [a, b] : spans) {
    if (a > hi) {
      total += hi - lo;
      lo = a;
      hi = b;
    } else {
      hi = std::max(hi, b);
    }
  }
  total += hi - lo;
  return std::min(1.0, total / record_length);
}

/// tau((t_m + t_n) / 2) = t_n - t_m for the best same-kind partner n of
/// each m, kept when C >= c0 and M >= m0.
inline IbiSeries estimate_ibi(const DisplacementTrace& trace, const FeatureSequence& seq,
                              const GateThresholds& thresholds, const IbiBounds& bounds,
                              std::size_t window = 9, double seg_len_s = 0.8) {
  thresholds.validate();
  bounds.validate();
  detail::require(window >= 1, "similarity window must hold at least one feature point");
  detail::require(seg_len_s > 0.0, "correlation segment length must be positive");
  IbiSeries out;
  if (seq.empty() || trace.size() < 2) return out;

  std::vector<std::pair<double, double>> spans;
  for (std::size_t m = 0; m < seq.size(); ++m) {
    const auto& pm = seq[m];
    std::optional<PairScore> best;
    for (std::size_t n = m + 1; n < seq.size(); ++n) {
      const auto& pn = seq[n];
      const double dt = pn.time - pm.time;
      if (dt > bounds.max_s) break;
      if (dt < bounds.min_s || pn.kind != pm.kind) continue;
      const auto sim = detail::try_topo_similarity(seq, m, n, window);
      if (!sim) continue;
      const auto [status, corr] = detail::try_local_corr(trace, pm.time, pn.time, seg_len_s);
      if (status != detail::CorrStatus::ok) continue;
      if (!best || *sim > best->topo_similarity || (*sim == best->topo_similarity && corr > best->local_corr))
        best = PairScore{m, n, *sim, corr};
    }
    if (!best || best->local_corr < thresholds.c0 || best->topo_similarity < thresholds.m0) continue;
    const double t_m = pm.time;
    const double t_n = seq[best->n].time;
    out.entries.push_back({0.5 * (t_m + t_n), t_n - t_m, *best});
    spans.emplace_back(t_m, t_n);
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const IbiEntry& a, const IbiEntry& b) { return a.time < b.time; });
  out.coverage = covered_fraction(std::move(spans), trace.duration());
  return out;
}

inline IbiSeries estimate_ibi(const DisplacementTrace& trace, const FeatureSequence& seq, const TopologyConfig& cfg,
                              const IbiBounds& bounds) {
  return estimate_ibi(trace, seq, cfg.thresholds, bounds, cfg.window, cfg.seg_len_s);
}

}  // namespace radar_ibi
