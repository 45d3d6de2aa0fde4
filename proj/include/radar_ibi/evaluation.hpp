#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "radar_ibi/config.hpp"
#include "radar_ibi/errors.hpp"
#include "radar_ibi/pipeline.hpp"
#include "radar_ibi/topology.hpp"

namespace radar_ibi {

/// Reference beat times (ECG R peaks or simulated pulse onsets).
class ReferenceIbi {
 public:
  ReferenceIbi() = default;
  explicit ReferenceIbi(std::vector<double> beat_times) : beats_(std::move(beat_times)) {
    for (std::size_t i = 1; i < beats_.size(); ++i)
      detail::require<DataIntegrity>(beats_[i] > beats_[i - 1], "beat times must be strictly increasing (entry " +
                                                                    std::to_string(i + 1) + ")");
  }

  const std::vector<double>& beat_times() const noexcept { return beats_; }

  std::vector<double> intervals() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < beats_.size(); ++i) out.push_back(beats_[i] - beats_[i - 1]);
    return out;
  }

  std::vector<double> midpoints() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < beats_.size(); ++i) out.push_back(0.5 * (beats_[i] + beats_[i - 1]));
    return out;
  }

  /// tau'(t): the interval of the beat pair enclosing t, held constant between
  /// beats; empty outside [first beat, last beat).
  std::optional<double> interval_at(double t) const {
    if (beats_.size() < 2 || t < beats_.front() || t >= beats_.back()) return std::nullopt;
    const auto it = std::upper_bound(beats_.begin(), beats_.end(), t);
    const auto k = static_cast<std::size_t>(it - beats_.begin());
    return beats_[k] - beats_[k - 1];
  }

 private:
  std::vector<double> beats_;
};

struct EvalReport {
  double rms_error_s = 0.0;
  std::size_t n_compared = 0;
  double coverage = 0.0;
  std::vector<double> per_entry_errors;
};

/// RMS of tau(t) - tau'(t) over the defined estimate entries.
inline EvalReport rms_error(const IbiSeries& est, const ReferenceIbi& ref) {
  EvalReport rep;
  rep.coverage = est.coverage;
  double acc = 0.0;
  for (const auto& e : est.entries) {
    const auto truth = ref.interval_at(e.time);
    if (!truth) continue;
    const double err = e.interval - *truth;
    rep.per_entry_errors.push_back(err);
    acc += err * err;
  }
  rep.n_compared = rep.per_entry_errors.size();
  if (rep.n_compared == 0) throw EmptyComparison("no IBI estimate falls inside the reference beat span");
  rep.rms_error_s = std::sqrt(acc / static_cast<double>(rep.n_compared));
  return rep;
}

struct SweepPoint {
  double f_c = 0.0;
  std::optional<double> rms_error_s;
  double coverage = 0.0;
  std::size_t n_compared = 0;
  /// Coverage reached `min_coverage`; only supported points compete for the minimum.
  bool supported = false;
  std::string failure;
};

struct SweepResult {
  std::vector<SweepPoint> curve;
  std::optional<std::size_t> best;  ///< index of the smallest supported error
};

/// Forced-cutoff sweep over `f_grid`. Per-cutoff failures are kept as
/// entries without an error value. An error computed from estimates that
/// cover less than `min_coverage` of the record is reported but excluded from
/// the minimum: a handful of surviving pairs says little about the cutoff.
inline SweepResult cutoff_sweep(const DisplacementTrace& detrended, const ReferenceIbi& ref,
                                const std::vector<double>& f_grid, const PipelineConfig& cfg,
                                double min_coverage = 0.5) {
  cfg.validate();
  detail::require(min_coverage >= 0.0 && min_coverage <= 1.0, "minimum sweep coverage must lie in [0, 1]");
  for (double f : f_grid)
    detail::require(f > 0.0 && f < detrended.fs / 2.0, "sweep frequency " + std::to_string(f) +
                                                           " Hz lies outside (0, fs/2)");
  SweepResult res;
  for (double f : f_grid) {
    SweepPoint p;
    p.f_c = f;
    try {
      const auto run = run_topology(detrended, FilterSpec::high_pass(f, cfg.filter_order), cfg);
      p.coverage = run.ibi.coverage;
      const auto rep = rms_error(run.ibi, ref);
      p.rms_error_s = rep.rms_error_s;
      p.n_compared = rep.n_compared;
      p.supported = p.coverage >= min_coverage;
      if (!p.supported) p.failure = "coverage below the sweep minimum";
    } catch (const Error& e) {
      p.failure = e.what();
    }
    res.curve.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < res.curve.size(); ++i) {
    const auto& e = res.curve[i].rms_error_s;
    if (e && res.curve[i].supported && (!res.best || *e < *res.curve[*res.best].rms_error_s)) res.best = i;
  }
  return res;
}

/// Inclusive uniform grid lo, lo + step, ..., hi.
inline std::vector<double> frequency_grid(double lo, double hi, double step) {
  detail::require(step > 0.0 && hi >= lo, "frequency grid needs lo <= hi and a positive step");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

enum class BeatFileFormat { automatic, csv, sidecar };

/// Beat times, one per line (plain CSV) or under an `onset_s` header column
/// (simulator sidecar). Blank lines and `#` comments are skipped.
inline ReferenceIbi load_reference_beats(const std::filesystem::path& path,
                                         BeatFileFormat format = BeatFileFormat::automatic) {
  std::ifstream in(path);
  if (!in) throw DataIntegrity("cannot open reference file " + path.string());
  std::vector<double> beats;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> column;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;

    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);

    if (first_content) {
      first_content = false;
      const auto header = std::find_if(cells.begin(), cells.end(), [](std::string c) {
        c.erase(0, c.find_first_not_of(" \t"));
        c.erase(c.find_last_not_of(" \t") + 1);
        return c == "onset_s";
      });
      if (header != cells.end()) {
        if (format == BeatFileFormat::csv) throw DataIntegrity(path.string() + ":1: unexpected header in plain CSV");
        column = static_cast<std::size_t>(header - cells.begin());
        continue;
      }
      if (format == BeatFileFormat::sidecar)
        throw DataIntegrity(path.string() + ":" + std::to_string(line_no) + ": sidecar lacks an onset_s header");
      column = 0;
    }
    const std::size_t col = column.value_or(0);
    double v = 0.0;
    try {
      std::size_t used = 0;
      detail::require<DataIntegrity>(col < cells.size(), "missing column");
      v = std::stod(cells[col], &used);
      detail::require<DataIntegrity>(cells[col].find_first_not_of(" \t", used) == std::string::npos,
                                     "trailing characters");
    } catch (const std::exception&) {
      throw DataIntegrity(path.string() + ":" + std::to_string(line_no) + ": cannot parse a beat time from '" + line +
                          "'");
    }
    if (!std::isfinite(v))
      throw DataIntegrity(path.string() + ":" + std::to_string(line_no) + ": beat time is not finite");
    if (!beats.empty() && v <= beats.back())
      throw DataIntegrity(path.string() + ":" + std::to_string(line_no) + ": beat time " + std::to_string(v) +
                          " does not increase on the previous " + std::to_string(beats.back()));
    beats.push_back(v);
  }
  return ReferenceIbi(std::move(beats));
}

}  // namespace radar_ibi
