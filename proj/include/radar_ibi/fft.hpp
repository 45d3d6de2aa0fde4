#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <vector>

namespace radar_ibi {

namespace detail {
// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Real-input DFT, bins 0 .. n/2 (unnormalized, e^{-j 2 pi k i / n} kernel).
inline std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  if (n == 0) return {};
  std::vector<double> in(x.begin(), x.end());
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace radar_ibi
