#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace radar_ibi;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambda = 3.8e-3;

/// Displacement demodulated after subtracting the slow-time mean of a unit
/// echo: lambda / (4 pi) unwrap(arg(e^{j phi} - mean e^{j phi})).
std::vector<double> mean_subtracted_oracle(const std::vector<double>& d) {
  const double k = 4 * kPi / kLambda;
  std::complex<double> mean{};
  for (double v : d) mean += std::polar(1.0, k * v);
  mean /= static_cast<double>(d.size());
  std::vector<double> ph;
  for (double v : d) ph.push_back(std::arg(std::polar(1.0, k * v) - mean));
  auto un = unwrap_phase(ph);
  for (double& v : un) v /= k;
  return un;
}

double peak_to_peak(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  const auto [a, b] = std::minmax_element(x.begin() + static_cast<std::ptrdiff_t>(lo),
                                          x.begin() + static_cast<std::ptrdiff_t>(hi));
  return *b - *a;
}

SceneSpec sine_scene(double amplitude_m) {
  auto s = testing::noiseless(human_default_scene());
  s.duration_s = 40.0;
  s.physio.heart_amp_m = 0.0;
  s.physio.resp_shape_exponent = 2.0;
  s.physio.resp_amp_m = 2.0 * amplitude_m;
  return s;
}

std::vector<cdouble> target_cell(const SimulatedScene& sim, std::optional<double> clutter_h) {
  const BeamformerWeights w{taylor_weights(12), {0.0}};
  if (clutter_h) return beamform_cell(sim.cube, w, sim.target_bin, 0, *clutter_h);
  const auto im = beamform(sim.cube, w);
  return im.cell(sim.target_bin, 0);
}

}  // namespace

TEST_CASE("unwrap restores a jump across the branch cut", "[displacement][unwrap]") {
  const std::vector<double> in{0.0, kPi - 0.1, -kPi + 0.1};
  const auto out = unwrap_phase(in);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == kPi - 0.1);
  CHECK(out[2] == Approx(kPi + 0.1).margin(1e-15));
}

TEST_CASE("unwrap recovers a slowly varying phase", "[displacement][unwrap]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> step(-2.5, 2.5);
  std::vector<double> truth{0.3}, wrapped;
  for (int i = 0; i < 2000; ++i) truth.push_back(truth.back() + step(rng));
  for (double v : truth) wrapped.push_back(std::remainder(v, 2 * kPi));
  const auto un = unwrap_phase(wrapped);
  for (std::size_t i = 0; i < truth.size(); ++i) REQUIRE(un[i] == Approx(truth[i]).margin(1e-9));
  CHECK(unwrap_phase(std::vector<double>{}).empty());
}

TEST_CASE("zero cell has no phase", "[displacement]") {
  std::vector<cdouble> z(50);
  CHECK_THROWS_AS(phase_displacement(z, 100.0, kLambda), DegenerateInput);
}

TEST_CASE("constant phase gives a constant trace", "[displacement]") {
  std::vector<cdouble> c(2000, std::polar(2.0, 1.1));
  const auto tr = phase_displacement(c, 100.0, kLambda);
  for (double v : tr.samples) REQUIRE(v == tr.samples.front());
  const auto det = gaussian_detrend(tr);
  for (double v : det.samples) REQUIRE(std::abs(v) <= 1e-15 * std::abs(tr.samples.front()) + 1e-300);
}

TEST_CASE("displacement is invariant to a positive scale", "[displacement]") {
  std::vector<cdouble> a, b;
  for (int i = 0; i < 100; ++i) {
    a.push_back(std::polar(1.0, 0.05 * i));
    b.push_back(7.5 * a.back());
  }
  const auto ta = phase_displacement(a, 100.0, kLambda);
  const auto tb = phase_displacement(b, 100.0, kLambda);
  for (std::size_t i = 0; i < ta.size(); ++i) REQUIRE(ta.samples[i] == Approx(tb.samples[i]).margin(1e-15));
}

TEST_CASE("sinusoidal displacement round trip", "[displacement][roundtrip]") {
  // 1 mm peak to peak.
  const auto sim = simulate_scene(sine_scene(0.5e-3), {});
  const auto& truth = sim.truth.trace.samples;
  const std::size_t n = truth.size();

  SECTION("without clutter removal the excursion is recovered") {
    const auto tr = phase_displacement(target_cell(sim, std::nullopt), 100.0, kLambda);
    CHECK(peak_to_peak(tr.samples, 0, n) == Approx(1e-3).epsilon(0.01));
    const double off = tr.samples[0] - truth[0];
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(tr.samples[i] - off - truth[i]) < 1e-8);
  }
  SECTION("after mean subtraction the output follows the analytic distortion") {
    const auto tr = phase_displacement(target_cell(sim, 40.0), 100.0, kLambda);
    const auto oracle = mean_subtracted_oracle(truth);
    const double off = tr.samples[0] - oracle[0];
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(tr.samples[i] - off - oracle[i]) < 1e-7);
  }
}

TEST_CASE("mean subtraction is transparent when the mean echo vanishes", "[displacement][roundtrip]") {
  // Phase amplitude at the first zero of J0 makes mean(e^{j phi}) ~ 0 for
  // a sinusoidal phase.
  const double j0_zero = 2.404825557695773;
  const double amp = j0_zero / (4 * kPi / kLambda);
  const auto sim = simulate_scene(sine_scene(amp), {});
  const auto tr = phase_displacement(target_cell(sim, 40.0), 100.0, kLambda);
  const auto& truth = sim.truth.trace.samples;
  CHECK(peak_to_peak(tr.samples, 0, truth.size()) == Approx(2 * amp).epsilon(0.01));

  auto noisy = sine_scene(amp);
  noisy.noise_snr_db = 30.0;
  const auto sim2 = simulate_scene(noisy, {});
  const auto tr2 = gaussian_detrend(phase_displacement(target_cell(sim2, 40.0), 100.0, kLambda));
  const auto ref = gaussian_detrend(sim2.truth.trace);
  std::vector<double> err;
  for (std::size_t i = 0; i < ref.size(); ++i) err.push_back(tr2.samples[i] - ref.samples[i]);
  CHECK(testing::rms(err) < 0.05 * testing::rms(ref.samples));
}

TEST_CASE("gaussian kernel", "[displacement][detrend]") {
  const auto k = gaussian_kernel(100.0, 4.0);
  REQUIRE(k.size() == 801);
  double sum = 0;
  for (double v : k) sum += v;
  CHECK(sum == Approx(1.0).margin(1e-14));
  for (std::size_t i = 0; i < k.size(); ++i) REQUIRE(k[i] == k[k.size() - 1 - i]);
  CHECK(k[400] / k[300] == Approx(std::exp(0.5)).epsilon(1e-12));
}

TEST_CASE("detrending removes an affine trend away from the edges", "[displacement][detrend]") {
  const auto tr = testing::make_trace(100.0, 30.0, [](double t) { return 2e-3 + 1e-4 * t; });
  const auto det = gaussian_detrend(tr);
  const double scale = *std::max_element(tr.samples.begin(), tr.samples.end());
  for (std::size_t i = 400; i + 400 < det.size(); ++i) REQUIRE(std::abs(det.samples[i]) < 1e-12 * scale);
  CHECK(det.detrended);
}

TEST_CASE("detrending passes cardiac frequencies", "[displacement][detrend]") {
  const auto tr = testing::make_trace(100.0, 60.0, [](double t) {
    return 1e-3 * t / 60.0 + 2e-4 * std::sin(2 * kPi * 1.2 * t);
  });
  const auto det = gaussian_detrend(tr);
  const double a = testing::fitted_amplitude(det.samples, 100.0, 1.2, 400, det.size() - 400);
  CHECK(std::abs(a - 2e-4) / 2e-4 < 1e-3);
}

TEST_CASE("detrending keeps white noise", "[displacement][detrend]") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  DisplacementTrace tr;
  tr.fs = 100.0;
  for (int i = 0; i < 6000; ++i) tr.samples.push_back(g(rng));
  const auto det = gaussian_detrend(tr);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    sxy += tr.samples[i] * det.samples[i];
    sxx += tr.samples[i] * tr.samples[i];
    syy += det.samples[i] * det.samples[i];
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.95);
}

// A sigma = 1 s Gaussian detrend keeps most of the 0.25 Hz respiration, and a
// 10 s window over 2.5 breaths has a residual mean near 18% of the RMS.
TEST_CASE("detrended default scene has a locally near-zero mean", "[displacement][detrend][!mayfail]") {
  const auto sim = simulate_scene(human_default_scene(), {});
  const auto w = PipelineConfig::human().weights(12);
  const auto det = gaussian_detrend(
      phase_displacement(beamform_cell(sim.cube, w, sim.target_bin, 60, 120.0), 100.0, kLambda));
  const double r = testing::rms(det.samples);
  const std::size_t win = 1000;  // 10 sigma
  double worst = 0;
  for (std::size_t s = 0; s + win <= det.size(); s += 100) {
    double m = 0;
    for (std::size_t i = s; i < s + win; ++i) m += det.samples[i];
    worst = std::max(worst, std::abs(m / win));
  }
  INFO("worst 10-sigma window mean " << worst << " m, trace RMS " << r << " m");
  CHECK(worst < 0.01 * r);
}

TEST_CASE("detrended default scene has a near-zero record mean", "[displacement][detrend]") {
  const auto sim = simulate_scene(human_default_scene(), {});
  const auto w = PipelineConfig::human().weights(12);
  const auto det = gaussian_detrend(
      phase_displacement(beamform_cell(sim.cube, w, sim.target_bin, 60, 120.0), 100.0, kLambda));
  double m = 0;
  for (double v : det.samples) m += v;
  m /= static_cast<double>(det.size());
  CHECK(std::abs(m) < 0.01 * testing::rms(det.samples));
}

TEST_CASE("detrending rejects short traces and bad parameters", "[displacement][detrend]") {
  const auto tr = testing::make_trace(100.0, 5.0, [](double t) { return t; });
  CHECK_THROWS_AS(gaussian_detrend(tr), InvalidArgument);
  DetrendConfig bad;
  bad.sigma_s = 0.0;
  const auto longer = testing::make_trace(100.0, 30.0, [](double t) { return t; });
  CHECK_THROWS_AS(gaussian_detrend(longer, bad), InvalidArgument);
}
