// radar-ibi: simulate, process, evaluate, sweep and plot.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "radar_ibi/radar_ibi.hpp"

namespace fs = std::filesystem;
using namespace radar_ibi;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PipelineConfig load_pipeline_config(const std::string& preset, const std::string& path) {
  PipelineConfig base;
  if (preset == "human")
    base = PipelineConfig::human();
  else if (preset == "chimpanzee")
    base = PipelineConfig::chimpanzee();
  else
    throw UsageError("unknown --preset '" + preset + "' (human, chimpanzee)");
  if (path.empty()) return base;
  return pipeline_config_from_json(read_json_file(path), base);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

fs::path default_truth_path(const fs::path& cube) {
  auto p = cube;
  p.replace_extension(".truth.csv");
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar heartbeat inter-beat-interval pipeline"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Synthesize a radar cube and its ground-truth beat sidecar");
  std::string sim_preset = "human-default";
  std::string sim_scene;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_snr;
  std::string sim_out;
  std::string sim_truth;
  sim->add_option("--preset", sim_preset, "Base scene")
      ->check(CLI::IsMember({"human-default", "chimp-default"}))
      ->capture_default_str();
  sim->add_option("--scene", sim_scene, "Scene JSON applied on top of the preset")->check(CLI::ExistingFile);
  sim->add_option("--seed", sim_seed, "Noise seed");
  sim->add_option("--snr", sim_snr, "Per-channel SNR at the target bin, dB");
  sim->add_option("-o,--output", sim_out, "Cube file to write")->required();
  sim->add_option("--truth", sim_truth, "Ground-truth sidecar (default: output with extension .truth.csv)");

  // process
  auto* proc = app.add_subcommand("process", "Run the pipeline on a radar cube");
  std::string proc_cube;
  std::string proc_config;
  std::string proc_preset = "human";
  std::string proc_out = ".";
  std::optional<double> proc_cutoff;
  proc->add_option("cube", proc_cube, "Radar cube file")->required()->check(CLI::ExistingFile);
  proc->add_option("-c,--config", proc_config, "Pipeline configuration JSON")->check(CLI::ExistingFile);
  proc->add_option("--preset", proc_preset, "Configuration preset (human, chimpanzee)")->capture_default_str();
  proc->add_option("-d,--out-dir", proc_out, "Output directory")->capture_default_str();
  proc->add_option("--cutoff", proc_cutoff, "Force the high-pass cutoff, Hz");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Compare an IBI CSV against reference beats");
  std::string eval_ibi;
  std::string eval_ref;
  std::string eval_format = "auto";
  std::string eval_out;
  std::optional<double> eval_duration;
  eval->add_option("ibi", eval_ibi, "IBI CSV from process")->required()->check(CLI::ExistingFile);
  eval->add_option("reference", eval_ref, "Reference beat times")->required()->check(CLI::ExistingFile);
  eval->add_option("--format", eval_format, "Reference format")
      ->check(CLI::IsMember({"auto", "csv", "sidecar"}))
      ->capture_default_str();
  eval->add_option("--duration", eval_duration, "Record length for coverage, s (default: last reference beat)");
  eval->add_option("-o,--output", eval_out, "Report JSON (default: stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Error versus forced high-pass cutoff");
  std::string sw_cube;
  std::string sw_ref;
  std::string sw_config;
  std::string sw_preset = "human";
  double sw_lo = 0.5, sw_hi = 3.0, sw_step = 0.1;
  std::string sw_out = "sweep.csv";
  sweep->add_option("cube", sw_cube, "Radar cube file")->required()->check(CLI::ExistingFile);
  sweep->add_option("reference", sw_ref, "Reference beat times")->required()->check(CLI::ExistingFile);
  sweep->add_option("-c,--config", sw_config, "Pipeline configuration JSON")->check(CLI::ExistingFile);
  sweep->add_option("--preset", sw_preset, "Configuration preset (human, chimpanzee)")->capture_default_str();
  sweep->add_option("--f-min", sw_lo, "Lowest cutoff, Hz")->capture_default_str();
  sweep->add_option("--f-max", sw_hi, "Highest cutoff, Hz")->capture_default_str();
  sweep->add_option("--f-step", sw_step, "Cutoff step, Hz")->capture_default_str();
  sweep->add_option("-o,--output", sw_out, "Sweep CSV")->capture_default_str();

  // plot
  auto* plot = app.add_subcommand("plot", "Render a CSV produced by this tool as SVG");
  std::string pl_csv;
  std::string pl_out;
  std::string pl_x;
  std::vector<std::string> pl_y;
  bool pl_scatter = false;
  std::string pl_title;
  plot->add_option("csv", pl_csv, "Input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--output", pl_out, "SVG file (default: <csv>.svg)");
  plot->add_option("-x", pl_x, "X column (default: first)");
  plot->add_option("-y", pl_y, "Y column(s) (default: second)");
  plot->add_flag("--scatter", pl_scatter, "Draw markers instead of lines");
  plot->add_option("--title", pl_title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (sim->parsed()) {
      SceneSpec base = sim_preset == "chimp-default" ? chimp_default_scene() : human_default_scene();
      SceneDocument doc{base, {}};
      if (!sim_scene.empty()) doc = scene_from_json(read_json_file(sim_scene), base);
      if (sim_seed) doc.scene.seed = *sim_seed;
      if (sim_snr) doc.scene.noise_snr_db = *sim_snr;
      doc.scene.validate();
      const auto result = simulate_scene(doc.scene, doc.geometry);
      write_radar_cube(sim_out, result.cube);
      const fs::path truth = sim_truth.empty() ? default_truth_path(sim_out) : fs::path(sim_truth);
      atomic_write_text(truth, sidecar_csv(result.truth.onsets_s));
      std::cout << "wrote " << sim_out << " (" << result.cube.n_time() << " x " << result.cube.n_range() << " x "
                << result.cube.n_channels() << ") and " << truth.string() << "\n";
    } else if (proc->parsed()) {
      auto cfg = load_pipeline_config(proc_preset, proc_config);
      if (proc_cutoff) cfg.cutoff_override_hz = *proc_cutoff;
      cfg.validate();
      const auto cube = read_radar_cube(proc_cube);
      const auto res = process_cube(cube, cfg);
      print_warnings(res.warnings);
      fs::create_directories(proc_out);
      const fs::path dir(proc_out);
      atomic_write_text(dir / "displacement.csv", trace_csv(res.detrended));
      atomic_write_text(dir / "filtered.csv", trace_csv(res.topology.filtered));
      std::string psd = "f_hz,psd\n";
      for (std::size_t k = 0; k < res.psd.freqs.size(); ++k)
        psd += detail::format_number("%.6f", res.psd.freqs[k]) + "," + detail::format_number("%.9g", res.psd.power[k]) +
               "\n";
      atomic_write_text(dir / "psd.csv", psd);
      auto sel = to_json(res.cutoff);
      sel["target"] = to_json(res.location);
      sel["coverage"] = res.topology.ibi.coverage;
      sel["n_ibi"] = res.topology.ibi.size();
      sel["warnings"] = res.warnings;
      atomic_write_text(dir / "cutoff.json", sel.dump(2) + "\n");
      atomic_write_text(dir / "ibi.csv", ibi_csv(res.topology.ibi));
      std::cout << "f_h2 " << res.cutoff.f_h2 << " Hz, f_c " << res.cutoff.f_c << " Hz, " << res.topology.ibi.size()
                << " IBI estimates, coverage " << res.topology.ibi.coverage << "\n";
    } else if (eval->parsed()) {
      const auto format = eval_format == "csv"       ? BeatFileFormat::csv
                          : eval_format == "sidecar" ? BeatFileFormat::sidecar
                                                     : BeatFileFormat::automatic;
      const auto ref = load_reference_beats(eval_ref, format);
      const double duration =
          eval_duration ? *eval_duration : (ref.beat_times().empty() ? 0.0 : ref.beat_times().back());
      const auto est = read_ibi_csv(eval_ibi, duration);
      const auto report = to_json(rms_error(est, ref)).dump(2) + "\n";
      if (eval_out.empty())
        std::cout << report;
      else
        atomic_write_text(eval_out, report);
    } else if (sweep->parsed()) {
      const auto cfg = load_pipeline_config(sw_preset, sw_config);
      const auto cube = read_radar_cube(sw_cube);
      const auto ref = load_reference_beats(sw_ref);
      const auto res = process_cube(cube, cfg);
      print_warnings(res.warnings);
      const auto curve = cutoff_sweep(res.detrended, ref, frequency_grid(sw_lo, sw_hi, sw_step), cfg);
      atomic_write_text(sw_out, sweep_csv(curve));
      std::cout << "selected f_c " << res.cutoff.f_c << " Hz";
      if (curve.best)
        std::cout << "; sweep minimum " << *curve.curve[*curve.best].rms_error_s << " s at "
                  << curve.curve[*curve.best].f_c << " Hz";
      std::cout << "\n";
    } else if (plot->parsed()) {
      const auto table = read_csv_table(pl_csv);
      detail::require<DataIntegrity>(table.columns.size() >= 2, pl_csv + ": plotting needs at least two columns");
      const std::size_t xc = pl_x.empty() ? 0 : table.column(pl_x);
      std::vector<std::size_t> ycs;
      for (const auto& y : pl_y) ycs.push_back(table.column(y));
      if (ycs.empty()) ycs.push_back(xc == 0 ? 1 : 0);
      Plot p;
      p.title = pl_title.empty() ? fs::path(pl_csv).filename().string() : pl_title;
      p.x_label = table.columns[xc];
      p.y_label = ycs.size() == 1 ? table.columns[ycs[0]] : "value";
      for (auto yc : ycs)
        p.series.push_back(
            {table.columns[yc], table.values(xc), table.values(yc), pl_scatter ? PlotStyle::scatter : PlotStyle::line});
      fs::path out = pl_out.empty() ? fs::path(pl_csv).replace_extension(".svg") : fs::path(pl_out);
      atomic_write_text(out, render_svg(p));
      std::cout << "wrote " << out.string() << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
