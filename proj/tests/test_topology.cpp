#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace radar_ibi;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
using K = FeatureKind;

std::vector<K> kinds_in(const FeatureSequence& s, double lo, double hi) {
  std::vector<K> out;
  for (const auto& p : s.points)
    if (p.time >= lo && p.time <= hi) out.push_back(p.kind);
  return out;
}

std::size_t count(const FeatureSequence& s, K k) {
  return static_cast<std::size_t>(
      std::count_if(s.points.begin(), s.points.end(), [&](const FeaturePoint& p) { return p.kind == k; }));
}

std::size_t inflections(const FeatureSequence& s) { return s.size() - count(s, K::peak) - count(s, K::trough); }

FeatureSequence periodic_kinds(std::size_t n) {
  const K cycle[] = {K::peak, K::infl_fall_decel, K::trough, K::infl_rise_decel};
  FeatureSequence s;
  for (std::size_t i = 0; i < n; ++i) s.points.push_back({0.25 * static_cast<double>(i), cycle[i % 4], 0.0});
  return s;
}

DisplacementTrace cardiac_trace(std::vector<double> ibi, double duration, std::vector<double>* onsets = nullptr) {
  PhysioModel p;
  p.resp_amp_m = 0.0;
  p.heart_ibi_s = std::move(ibi);
  auto d = synth_displacement(p, 100.0, duration);
  if (onsets) *onsets = d.onsets_s;
  return d.trace;
}

IbiBounds human_bounds() { return IbiBounds::from_band(SpeciesBand::human()); }

/// Filtered and smoothed trace of a simulated noisy scene, as fed to the gate.
DisplacementTrace noisy_scene_trace(std::uint64_t seed) {
  auto s = human_default_scene();
  s.duration_s = 60.0;
  s.seed = seed;
  const auto sim = simulate_scene(s, {});
  auto cfg = PipelineConfig::human();
  cfg.clutter_horizon_s = cfg.localization_horizon_s = 60.0;
  const auto res = process_cube(sim.cube, cfg);
  return gaussian_smooth(res.topology.filtered, cfg.feature_smoothing_s);
}

}  // namespace

TEST_CASE("sinusoid feature counts", "[topology][features]") {
  // The phase offset keeps every event of the ten cycles inside the record.
  const auto tr = testing::sine_trace(100.0, 10.0, 1.0, 1.0, 0.3);
  const auto s = extract_features(tr);
  CHECK(count(s, K::peak) == 10);
  CHECK(count(s, K::trough) == 10);
  CHECK(inflections(s) == 20);
}

TEST_CASE("sinusoid features cycle in analytic order", "[topology][features]") {
  const auto s = extract_features(testing::sine_trace(100.0, 10.0, 1.0));
  const auto k = kinds_in(s, 0.1, 9.9);
  const std::vector<K> cycle{K::peak, K::infl_fall_decel, K::trough, K::infl_rise_decel};
  REQUIRE(k.size() >= 36);
  for (std::size_t i = 0; i < k.size(); ++i) REQUIRE(k[i] == cycle[i % 4]);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].kind == K::peak) CHECK(std::abs(s[i].time - (std::floor(s[i].time) + 0.25)) < 1e-3);
}

TEST_CASE("shouldered waveform produces all six kinds in analytic order", "[topology][features]") {
  // x = sin(w t) + 0.25 cos(3 w t), w = 2 pi.
  const double w = 2 * kPi;
  const auto tr = testing::make_trace(100.0, 10.0, [&](double t) { return std::sin(w * t) + 0.25 * std::cos(3 * w * t); });
  const auto d1 = [&](double t) { return w * std::cos(w * t) - 0.75 * w * std::sin(3 * w * t); };
  const auto d2 = [&](double t) { return -w * w * std::sin(w * t) - 2.25 * w * w * std::cos(3 * w * t); };
  const auto d3 = [&](double t) { return -w * w * w * std::cos(w * t) + 6.75 * w * w * w * std::sin(3 * w * t); };
  const auto oracle = testing::analytic_events(d1, d2, d3, 0.5, 9.5);
  const auto s = extract_features(tr);
  std::vector<FeaturePoint> got;
  for (const auto& p : s.points)
    if (p.time >= 0.5 && p.time <= 9.5) got.push_back(p);
  REQUIRE(got.size() == oracle.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    REQUIRE(got[i].kind == oracle[i].kind);
    CHECK(std::abs(got[i].time - oracle[i].t) < 2e-3);
  }
  for (K k : {K::peak, K::trough, K::infl_rise_accel, K::infl_rise_decel, K::infl_fall_accel, K::infl_fall_decel})
    CHECK(count(s, k) >= 9);
}

TEST_CASE("feature extraction edge cases", "[topology][features]") {
  DisplacementTrace c;
  c.fs = 100.0;
  c.samples.assign(500, 1.5e-3);
  CHECK(extract_features(c).empty());
  c.samples.assign(2, 0.0);
  CHECK_THROWS_AS(extract_features(c), InvalidArgument);
  CHECK(to_string(K::infl_rise_accel) == "infl_rise_accel");
}

TEST_CASE("feature extraction is equivariant to shifts and scaling", "[topology][features]") {
  const auto tr = noisy_scene_trace(4);
  auto shifted = tr;
  shifted.t0 = 3.7;
  auto scaled = tr;
  for (double& v : scaled.samples) v *= 5.0;
  const auto a = extract_features(tr), b = extract_features(shifted), c = extract_features(scaled);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].kind == b[i].kind);
    REQUIRE(a[i].kind == c[i].kind);
    REQUIRE(b[i].time - a[i].time == Approx(3.7).margin(1e-9));
    REQUIRE(c[i].time == Approx(a[i].time).margin(1e-12));
  }
  const auto ia = estimate_ibi(tr, a, TopologyConfig{}, human_bounds());
  const auto ib = estimate_ibi(shifted, b, TopologyConfig{}, human_bounds());
  const auto ic = estimate_ibi(scaled, c, TopologyConfig{}, human_bounds());
  REQUIRE(ia.size() == ib.size());
  REQUIRE(ia.size() == ic.size());
  for (std::size_t i = 0; i < ia.size(); ++i) {
    CHECK(ib.entries[i].interval == Approx(ia.entries[i].interval).margin(1e-9));
    CHECK(ib.entries[i].time - ia.entries[i].time == Approx(3.7).margin(1e-9));
    CHECK(ic.entries[i].interval == Approx(ia.entries[i].interval).margin(1e-12));
  }
}

TEST_CASE("topological similarity", "[topology][score]") {
  auto s = periodic_kinds(28);
  CHECK(topo_similarity(s, 10, 10, 9) == 1.0);
  CHECK(topo_similarity(s, 8, 16, 9) == 1.0);
  CHECK(topo_similarity(s, 8, 14, 9) < 1.0);
  // Window of 8 starts 3 points back: entries 13..20 for n = 16.
  s.points[14].kind = K::infl_rise_accel;
  s.points[18].kind = K::infl_fall_accel;
  CHECK(topo_similarity(s, 8, 16, 8) == Approx(0.75));
  CHECK_THROWS_AS(topo_similarity(s, 1, 10, 9), OutOfRange);
  CHECK_THROWS_AS(topo_similarity(s, 8, 26, 9), OutOfRange);
}

TEST_CASE("local correlation", "[topology][score]") {
  auto s = [](double t) { return std::sin(2 * kPi * 1.3 * t) + 0.5 * std::sin(2 * kPi * 0.7 * t); };
  const auto odd = testing::make_trace(100.0, 10.0, [&](double t) { return t < 5.0 ? s(t) : -s(t - 5.0); });
  CHECK(local_corr(odd, 2.0, 2.0, 0.8) == Approx(1.0).margin(1e-12));
  CHECK(local_corr(odd, 2.0, 7.0, 0.8) == Approx(-1.0).margin(1e-12));

  const auto periodic = testing::sine_trace(100.0, 10.0, 1.0);
  CHECK(local_corr(periodic, 2.13, 3.13, 0.8) >= 0.999);

  DisplacementTrace flat;
  flat.fs = 100.0;
  flat.samples.assign(1000, 2.0);
  CHECK_THROWS_AS(local_corr(flat, 2.0, 3.0, 0.8), DegenerateInput);
  CHECK_THROWS_AS(local_corr(periodic, 0.2, 3.0, 0.8), OutOfRange);
  CHECK_THROWS_AS(local_corr(periodic, 2.0, 9.8, 0.8), OutOfRange);
}

TEST_CASE("clean cardiac trace gives the true interval", "[topology][ibi]") {
  const auto tr = cardiac_trace({0.857}, 60.0);
  auto cfg = PipelineConfig::human();
  cfg.topology.thresholds = {0.8, 0.8};
  const auto res = process_trace(tr, cfg);
  const auto& ibi = res.topology.ibi;
  REQUIRE(ibi.size() > 50);
  for (const auto& e : ibi.entries) REQUIRE(std::abs(e.interval - 0.857) <= 5e-3);
  CHECK(ibi.coverage > 0.9);
}

TEST_CASE("unfiltered pulse train stays within one sample", "[topology][ibi]") {
  // Flat gaps between pulses put troughs at plateau midpoints, which are
  // only resolved to the sampling grid.
  const auto tr = cardiac_trace({0.857}, 60.0);
  const auto ibi = estimate_ibi(tr, extract_features(tr), TopologyConfig{}, human_bounds());
  REQUIRE(ibi.size() > 50);
  for (const auto& e : ibi.entries) REQUIRE(std::abs(e.interval - 0.857) <= 1.0 / tr.fs);
}

TEST_CASE("periodic input of known period", "[topology][ibi]") {
  const double period = 0.9;
  const auto tr = testing::make_trace(100.0, 30.0, [&](double t) {
    const double p = 2 * kPi * t / period;
    return std::sin(p) + 0.4 * std::sin(2 * p + 0.5) + 0.2 * std::cos(3 * p);
  });
  const auto ibi = estimate_ibi(tr, extract_features(tr), TopologyConfig{}, human_bounds());
  REQUIRE_FALSE(ibi.empty());
  for (const auto& e : ibi.entries) REQUIRE(std::abs(e.interval - period) <= 1e-3);
}

TEST_CASE("thresholds above one admit nothing", "[topology][ibi]") {
  const auto tr = cardiac_trace({0.857}, 30.0);
  const auto ibi = estimate_ibi(tr, extract_features(tr), GateThresholds{1.01, 0.5}, human_bounds());
  CHECK(ibi.empty());
  CHECK(ibi.coverage == 0.0);
}

TEST_CASE("ramped intervals are tracked", "[topology][ibi]") {
  std::vector<double> ibi_list;
  for (int j = 0; j < 70; ++j) ibi_list.push_back(0.7 + 0.3 * j / 69.0);
  std::vector<double> onsets;
  const auto tr = cardiac_trace(ibi_list, 60.0, &onsets);
  const ReferenceIbi ref(onsets);
  const auto ibi = estimate_ibi(tr, extract_features(tr), TopologyConfig{}, human_bounds());
  REQUIRE(ibi.size() > 40);
  for (const auto& e : ibi.entries) {
    const auto truth = ref.interval_at(e.time);
    if (truth) CHECK(std::abs(e.interval - *truth) <= 0.01);
  }
  for (std::size_t i = 1; i < ibi.size(); ++i) CHECK(ibi.entries[i].interval >= ibi.entries[i - 1].interval - 0.01);
}

TEST_CASE("gating is monotone in both thresholds", "[topology][ibi]") {
  const auto tr = noisy_scene_trace(6);
  const auto seq = extract_features(tr);
  const std::vector<double> c0s{0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  const std::vector<double> m0s{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::vector<std::size_t>> n(c0s.size(), std::vector<std::size_t>(m0s.size()));
  for (std::size_t i = 0; i < c0s.size(); ++i)
    for (std::size_t j = 0; j < m0s.size(); ++j)
      n[i][j] = estimate_ibi(tr, seq, GateThresholds{c0s[i], m0s[j]}, human_bounds()).size();
  for (std::size_t i = 0; i < c0s.size(); ++i)
    for (std::size_t j = 0; j < m0s.size(); ++j) {
      if (i > 0) REQUIRE(n[i][j] <= n[i - 1][j]);
      if (j > 0) REQUIRE(n[i][j] <= n[i][j - 1]);
    }
  CHECK(n.front().front() > n.back().back());
}

TEST_CASE("intervals respect the species bounds and scores the gate", "[topology][ibi]") {
  const auto tr = noisy_scene_trace(2);
  const auto bounds = human_bounds();
  const TopologyConfig cfg;
  const auto ibi = estimate_ibi(tr, extract_features(tr), cfg, bounds);
  REQUIRE_FALSE(ibi.empty());
  for (const auto& e : ibi.entries) {
    CHECK(e.interval >= bounds.min_s);
    CHECK(e.interval <= bounds.max_s);
    CHECK(e.score.local_corr >= cfg.thresholds.c0);
    CHECK(e.score.topo_similarity >= cfg.thresholds.m0);
  }
  CHECK(bounds.min_s == Approx(0.8 / 1.7));
  CHECK(bounds.max_s == Approx(1.2 / 1.0));
}

TEST_CASE("topology stage is deterministic", "[topology][ibi]") {
  const auto tr = noisy_scene_trace(1);
  const auto a = estimate_ibi(tr, extract_features(tr), TopologyConfig{}, human_bounds());
  const auto b = estimate_ibi(tr, extract_features(tr), TopologyConfig{}, human_bounds());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a.entries[i].time == b.entries[i].time);
    REQUIRE(a.entries[i].interval == b.entries[i].interval);
  }
  CHECK(a.coverage == b.coverage);
}

TEST_CASE("covered fraction merges overlapping spans", "[topology][ibi]") {
  CHECK(covered_fraction({{0, 2}, {1, 3}, {5, 6}}, 10.0) == Approx(0.4));
  CHECK(covered_fraction({}, 10.0) == 0.0);
  CHECK(covered_fraction({{0, 20}}, 10.0) == 1.0);
}
