#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radar_ibi/errors.hpp"

namespace radar_ibi {

using cfloat = std::complex<float>;
using cdouble = std::complex<double>;

/// Multi-channel slow-time signal s_n(t, r).
///
/// Samples are stored slow-time-major, then range bin, then virtual channel,
/// the same order as the on-disk payload. Single precision matches the file
/// format so that a write/read round trip is lossless.
class RadarCube {
 public:
  RadarCube() = default;

  RadarCube(std::size_t n_time, std::vector<double> range_axis_m, std::size_t n_tx, std::size_t n_rx,
            double slow_time_fs_hz, double wavelength_m)
      : n_time_(n_time),
        n_tx_(n_tx),
        n_rx_(n_rx),
        fs_(slow_time_fs_hz),
        wavelength_(wavelength_m),
        range_axis_(std::move(range_axis_m)) {
    validate();
    samples_.assign(n_time_ * range_axis_.size() * n_channels(), cfloat{});
  }

  std::size_t n_time() const noexcept { return n_time_; }
  std::size_t n_range() const noexcept { return range_axis_.size(); }
  std::size_t n_channels() const noexcept { return n_tx_ * n_rx_; }
  std::size_t n_tx() const noexcept { return n_tx_; }
  std::size_t n_rx() const noexcept { return n_rx_; }
  double slow_time_fs() const noexcept { return fs_; }
  double wavelength() const noexcept { return wavelength_; }
  double duration() const noexcept { return static_cast<double>(n_time_) / fs_; }
  const std::vector<double>& range_axis() const noexcept { return range_axis_; }

  std::size_t index(std::size_t t, std::size_t r, std::size_t n) const noexcept {
    return (t * n_range() + r) * n_channels() + n;
  }
  cfloat& at(std::size_t t, std::size_t r, std::size_t n) noexcept { return samples_[index(t, r, n)]; }
  const cfloat& at(std::size_t t, std::size_t r, std::size_t n) const noexcept { return samples_[index(t, r, n)]; }

  /// Channel vector s(t, r).
  std::span<const cfloat> snapshot(std::size_t t, std::size_t r) const noexcept {
    return {samples_.data() + index(t, r, 0), n_channels()};
  }

  std::span<cfloat> data() noexcept { return samples_; }
  std::span<const cfloat> data() const noexcept { return samples_; }

  void validate() const {
    detail::require(n_time_ >= 1, "radar cube needs at least one slow-time sample");
    detail::require(n_tx_ >= 1 && n_rx_ >= 1, "radar cube needs at least one virtual channel");
    detail::require(fs_ > 0.0, "slow-time sampling frequency must be positive");
    detail::require(wavelength_ > 0.0, "wavelength must be positive");
    detail::require(!range_axis_.empty(), "range axis must not be empty");
    for (std::size_t i = 1; i < range_axis_.size(); ++i)
      detail::require(range_axis_[i] > range_axis_[i - 1], "range axis must be strictly increasing");
  }

 private:
  std::size_t n_time_ = 0;
  std::size_t n_tx_ = 1;
  std::size_t n_rx_ = 1;
  double fs_ = 1.0;
  double wavelength_ = 1.0;
  std::vector<double> range_axis_;
  std::vector<cfloat> samples_;
};

}  // namespace radar_ibi
