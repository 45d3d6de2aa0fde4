#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

using namespace radar_ibi;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

/// Squared magnitude of an order-n bilinear Butterworth high-pass.
double hp_power(double f, double fc, double fs, int n) {
  const double r = std::tan(kPi * fc / fs) / std::tan(kPi * f / fs);
  return 1.0 / (1.0 + std::pow(r, 2 * n));
}

double lp_power(double f, double fc, double fs, int n) {
  const double r = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
  return 1.0 / (1.0 + std::pow(r, 2 * n));
}

double gain(const DisplacementTrace& in, const DisplacementTrace& out, double f) {
  const std::size_t lo = out.size() / 4, hi = 3 * out.size() / 4;
  return testing::fitted_amplitude(out.samples, out.fs, f, lo, hi) /
         testing::fitted_amplitude(in.samples, in.fs, f, lo, hi);
}

}  // namespace

TEST_CASE("single-pass response matches the reference design", "[filter]") {
  // scipy.signal.butter(4, 2.25, 'high', fs=100, output='sos') via sosfreqz.
  const auto sos = design_filter(FilterSpec::high_pass(2.25), 100.0);
  REQUIRE(sos.size() == 2);
  const std::pair<double, double> ref[] = {{0.5625, 0.003881869795120574},
                                           {2.25, 0.7071067811865476},
                                           {2.8125, 0.9258800004385264},
                                           {4.5, 0.9981291086720715},
                                           {11.25, 0.999999079615838}};
  for (const auto& [f, m] : ref) CHECK(std::abs(frequency_response(sos, f, 100.0)) == Approx(m).epsilon(1e-9));
}

TEST_CASE("response follows the analytic Butterworth magnitude", "[filter]") {
  for (int order : {1, 2, 3, 4, 6}) {
    const auto hp = design_filter(FilterSpec::high_pass(1.7, order), 145.56);
    for (double f = 0.05; f < 70.0; f *= 1.3)
      REQUIRE(std::norm(frequency_response(hp, f, 145.56)) == Approx(hp_power(f, 1.7, 145.56, order)).margin(1e-12));
  }
  const auto bp = design_filter(FilterSpec::band_pass(1.0, 1.7), 100.0);
  for (double f = 0.05; f < 49.0; f *= 1.3)
    REQUIRE(std::norm(frequency_response(bp, f, 100.0)) ==
            Approx(hp_power(f, 1.0, 100.0, 4) * lp_power(f, 1.7, 100.0, 4)).margin(1e-12));
}

TEST_CASE("zero-phase high-pass passes five times the cutoff", "[filter]") {
  const double fc = 2.25;
  const auto tr = testing::sine_trace(100.0, 60.0, 5 * fc, 1e-4);
  const auto out = apply_filter(tr, FilterSpec::high_pass(fc));
  CHECK(std::abs(gain(tr, out, 5 * fc) - 1.0) < 0.01);
}

TEST_CASE("zero-phase high-pass rejects a quarter of the cutoff", "[filter]") {
  const double fc = 2.25;
  const auto tr = testing::sine_trace(100.0, 60.0, fc / 4, 1e-3);
  const auto out = apply_filter(tr, FilterSpec::high_pass(fc));
  const double g = gain(tr, out, fc / 4);
  CHECK(20 * std::log10(g) <= -30.0);
  CHECK(g == Approx(hp_power(fc / 4, fc, 100.0, 4)).epsilon(0.05));
}

TEST_CASE("zero-phase gain beyond twice the cutoff is within one percent", "[filter]") {
  const double fc = 1.5;
  for (double f : {2 * fc, 2.5 * fc, 4 * fc, 10 * fc}) {
    const auto tr = testing::sine_trace(100.0, 60.0, f, 1.0);
    const double g = gain(tr, apply_filter(tr, FilterSpec::high_pass(fc)), f);
    CHECK(std::abs(g - 1.0) < 0.01);
    CHECK(g == Approx(hp_power(f, fc, 100.0, 4)).epsilon(1e-4));
  }
}

TEST_CASE("zero input gives zero output", "[filter]") {
  DisplacementTrace tr;
  tr.fs = 100.0;
  tr.samples.assign(500, 0.0);
  for (const auto& spec : {FilterSpec::high_pass(2.0), FilterSpec::band_pass(0.8, 2.0)})
    for (double v : apply_filter(tr, spec).samples) REQUIRE(v == 0.0);
}

TEST_CASE("high-pass removes a constant offset from the first sample", "[filter]") {
  DisplacementTrace tr;
  tr.fs = 100.0;
  tr.samples.assign(2000, 3e-3);
  for (double v : apply_filter(tr, FilterSpec::high_pass(2.0)).samples) REQUIRE(std::abs(v) < 1e-15);
}

TEST_CASE("zero-phase filtering introduces no lag", "[filter]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  DisplacementTrace noise;
  noise.fs = 100.0;
  for (int i = 0; i < 6000; ++i) noise.samples.push_back(g(rng));
  // Band-limit the input first so the comparison is between like signals.
  const auto in = apply_filter(noise, FilterSpec::band_pass(3.0, 8.0));
  const auto out = apply_filter(in, FilterSpec::high_pass(2.0));
  int best_lag = 99;
  double best = -1e300;
  for (int lag = -20; lag <= 20; ++lag) {
    double acc = 0;
    for (std::size_t i = 100; i + 100 < in.size(); ++i) acc += in.samples[i] * out.samples[i + lag];
    if (acc > best) best = acc, best_lag = lag;
  }
  CHECK(best_lag == 0);
}

TEST_CASE("causal mode matches a direct difference equation", "[filter]") {
  auto spec = FilterSpec::high_pass(3.0, 2);
  spec.zero_phase = false;
  const auto sos = design_filter(spec, 50.0);
  REQUIRE(sos.size() == 1);
  const auto& q = sos[0];
  const auto tr = testing::make_trace(50.0, 4.0, [](double t) { return std::sin(7 * t) + t * t; });
  const auto out = apply_filter(tr, spec);
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double x = tr.samples[i];
    const double y = q.b0 * x + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
    REQUIRE(out.samples[i] == Approx(y).margin(1e-12));
    x2 = x1, x1 = x, y2 = y1, y1 = y;
  }
}

TEST_CASE("invalid filter specs are rejected", "[filter]") {
  const auto tr = testing::sine_trace(100.0, 10.0, 1.0);
  CHECK_THROWS_AS(apply_filter(tr, FilterSpec::high_pass(50.0)), InvalidArgument);
  CHECK_THROWS_AS(apply_filter(tr, FilterSpec::high_pass(0.0)), InvalidArgument);
  CHECK_THROWS_AS(apply_filter(tr, FilterSpec::band_pass(2.0, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(apply_filter(tr, FilterSpec::high_pass(1.0, 0)), InvalidArgument);
}

TEST_CASE("baseline band-pass filter specs", "[filter]") {
  const auto specs = baseline_bandpass_specs(SpeciesBand::human());
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].kind == FilterKind::band_pass);
  CHECK(specs[0].cutoffs_hz == std::vector<double>{1.0, 1.7});
  CHECK(specs[1].cutoffs_hz == std::vector<double>{0.8, 2.0});
  CHECK(specs[0].zero_phase);
}
