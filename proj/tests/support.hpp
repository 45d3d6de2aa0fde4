#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "radar_ibi/radar_ibi.hpp"

namespace testing {

using radar_ibi::DisplacementTrace;

inline DisplacementTrace make_trace(double fs, double duration, const std::function<double(double)>& f) {
  DisplacementTrace tr;
  tr.fs = fs;
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  tr.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.samples[i] = f(static_cast<double>(i) / fs);
  return tr;
}

inline DisplacementTrace sine_trace(double fs, double duration, double freq, double amp = 1.0, double phase = 0.0) {
  return make_trace(fs, duration,
                    [&](double t) { return amp * std::sin(2.0 * std::numbers::pi * freq * t + phase); });
}

/// Plain O(n) DFT magnitude at one frequency, used as an oracle against the FFT path.
inline double dft_magnitude(const std::vector<double>& x, double fs, double f) {
  std::complex<double> acc{};
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += x[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return std::abs(acc);
}

/// Least-squares amplitude of a sinusoid of known frequency over [lo, hi).
inline double fitted_amplitude(const std::vector<double>& x, double fs, double f, std::size_t lo, std::size_t hi) {
  double cc = 0, ss = 0, cs = 0, xc = 0, xs = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double w = 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs;
    const double c = std::cos(w), s = std::sin(w);
    cc += c * c, ss += s * s, cs += c * s, xc += x[i] * c, xs += x[i] * s;
  }
  const double det = cc * ss - cs * cs;
  const double a = (xc * ss - xs * cs) / det;
  const double b = (xs * cc - xc * cs) / det;
  return std::hypot(a, b);
}

inline double rms(const std::vector<double>& x) {
  double acc = 0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline radar_ibi::SceneSpec noiseless(radar_ibi::SceneSpec s) {
  s.noise_snr_db = std::numeric_limits<double>::infinity();
  return s;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("radar_ibi_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct AnalyticEvent {
  double t;
  radar_ibi::FeatureKind kind;
};

/// Extrema and inflections of x(t) from its analytic derivatives, located by
/// bisection on a fine grid and classified from the signs of x', x'', x'''.
inline std::vector<AnalyticEvent> analytic_events(const std::function<double(double)>& d1,
                                           const std::function<double(double)>& d2,
                                           const std::function<double(double)>& d3, double lo, double hi) {
  auto roots = [&](const std::function<double(double)>& f) {
    std::vector<double> r;
    const double h = 1e-4;
    for (double a = lo; a + h <= hi; a += h) {
      double x0 = a, x1 = a + h;
      if (f(x0) * f(x1) >= 0) continue;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (x0 + x1);
        (f(x0) * f(m) <= 0 ? x1 : x0) = m;
      }
      r.push_back(0.5 * (x0 + x1));
    }
    return r;
  };
  std::vector<AnalyticEvent> ev;
  for (double t : roots(d1)) ev.push_back({t, d2(t) < 0 ? radar_ibi::FeatureKind::peak : radar_ibi::FeatureKind::trough});
  for (double t : roots(d2)) {
    const bool rising = d1(t) > 0;
    const bool slope_max = d3(t) < 0;
    radar_ibi::FeatureKind k = rising ? (slope_max ? radar_ibi::FeatureKind::infl_rise_decel : radar_ibi::FeatureKind::infl_rise_accel)
                 : (slope_max ? radar_ibi::FeatureKind::infl_fall_accel : radar_ibi::FeatureKind::infl_fall_decel);
    ev.push_back({t, k});
  }
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return ev;
}

}  // namespace testing
