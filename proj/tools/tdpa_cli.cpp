// Command-line front end: synthesize scenarios, run the trackers over
// detection streams, evaluate predictions, and mine hard examples from an
// embedding gallery. Exit codes: 0 success, 2 bad input or configuration,
// 3 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdpa/tdpa.hpp"

namespace {

using tdpa::jsonu::Json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tdpa::ValidationError("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

Json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in = open_input(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw tdpa::ValidationError(what + ": malformed JSON in " + path + " (" + e.what() + ")");
  }
}

struct CommonTrackFlags {
  std::string config_path;
  std::string mode;
  std::optional<std::int64_t> seed;
};

tdpa::EngineConfig load_config(const CommonTrackFlags& flags) {
  tdpa::EngineConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = tdpa::config_from_json(read_json_file(flags.config_path, "config"));
  }
  if (!flags.mode.empty()) cfg.engine.mode = tdpa::mode_from_string(flags.mode);
  if (flags.seed) cfg.engine.seed = static_cast<std::uint64_t>(*flags.seed);
  return cfg;
}

tdpa::ScenarioSpec load_scenario(const std::string& preset_name, const std::string& scenario_path,
                                 const std::optional<std::int64_t>& seed) {
  if (preset_name.empty() == scenario_path.empty()) {
    throw tdpa::ValidationError("exactly one of --preset and --scenario is required");
  }
  tdpa::ScenarioSpec spec = preset_name.empty()
                                ? tdpa::scenario_from_json(read_json_file(scenario_path, "scenario"))
                                : tdpa::preset(preset_name);
  if (seed) spec.seed = static_cast<std::uint64_t>(*seed);
  return spec;
}

void write_stream_files(const tdpa::SimulationResult& sim, std::size_t embedding_dim,
                        const std::string& stream_path, const std::string& truth_path) {
  tdpa::StreamHeader header;
  header.frame_w = sim.dims.width;
  header.frame_h = sim.dims.height;
  header.embedding_dim = static_cast<int>(embedding_dim);
  header.n_frames = static_cast<std::int64_t>(sim.frames.size());
  auto stream_out = open_output(stream_path);
  tdpa::write_detection_stream(stream_out, header, sim.frames);
  auto truth_out = open_output(truth_path);
  tdpa::write_truth(truth_out, sim.truth);
}

void write_report(const tdpa::EvalReport& report, const std::string& path) {
  const Json j = tdpa::report_json(report);
  if (path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    open_output(path) << j.dump(2) << '\n';
  }
}

void write_curves(const std::vector<tdpa::PredictionRecord>& preds, const std::vector<tdpa::TruthRecord>& truth,
                  const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  bool all_present = true, any_present = false, any_absent = false;
  for (const tdpa::TruthRecord& tr : truth) {
    all_present = all_present && tr.present;
    any_present = any_present || tr.present;
    any_absent = any_absent || !tr.present;
  }
  auto open_csv = [&dir](const char* name) {
    auto os = open_output((fs::path(dir) / name).string());
    os << std::setprecision(17);
    return os;
  };
  if (all_present && !preds.empty()) {
    auto os = open_csv("success_curve.csv");
    os << "tau,success_rate\n";
    for (const auto& p : tdpa::success_curve(preds, truth)) os << p.tau << ',' << p.rate << '\n';
  }
  if (any_present) {
    auto os = open_csv("f_curve.csv");
    os << "tau,pr,re,f\n";
    for (const auto& p : tdpa::f_curve(preds, truth)) {
      os << p.tau << ',' << p.pr << ',' << p.re << ',' << p.f << '\n';
    }
  }
  if (any_absent) {
    auto os = open_csv("gm_curve.csv");
    os << "tau,tpr,tnr,gm\n";
    for (const auto& p : tdpa::gm_curve(preds, truth)) {
      os << p.tau << ',' << p.tpr << ',' << p.tnr << ',' << p.gm << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tracklet-based single-target tracking over detection streams"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Render a synthetic scenario to stream + truth files");
  std::string sim_preset, sim_scenario, sim_stream_out, sim_truth_out, sim_config;
  std::optional<std::int64_t> sim_seed;
  sim_cmd->add_option("--preset", sim_preset, "Built-in scenario: crossing_distractor, occlusion_40, out_of_view, clutter");
  sim_cmd->add_option("--scenario", sim_scenario, "Scenario JSON file");
  sim_cmd->add_option("--seed", sim_seed, "Override the scenario seed");
  sim_cmd->add_option("--config", sim_config, "Tracker config JSON (supplies the scoring oracle)");
  sim_cmd->add_option("--out-stream", sim_stream_out, "Detection stream output path")->required();
  sim_cmd->add_option("--out-truth", sim_truth_out, "Ground truth output path")->required();
  sim_cmd->callback([&] {
    const tdpa::ScenarioSpec spec = load_scenario(sim_preset, sim_scenario, sim_seed);
    CommonTrackFlags flags;
    flags.config_path = sim_config;
    const tdpa::EngineConfig cfg = load_config(flags);
    const tdpa::SimulationResult sim = tdpa::generate(spec, cfg.oracle);
    write_stream_files(sim, spec.objects.front().embedding_prototype.size(), sim_stream_out, sim_truth_out);
  });

  // track / track-st
  CommonTrackFlags track_flags;
  std::string track_stream, track_out;
  std::optional<std::int64_t> track_ff_det;
  auto add_track_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", track_flags.config_path, "Tracker config JSON");
    cmd->add_option("--seed", track_flags.seed, "Override the config seed");
    cmd->add_option("--stream", track_stream, "Detection stream input")->required();
    cmd->add_option("--out", track_out, "Prediction output path")->required();
    cmd->add_option("--ff-det", track_ff_det, "det_id of the frame-0 template (default: first line)");
  };
  auto run_track_cmd = [&](bool force_short_term) {
    tdpa::EngineConfig cfg = load_config(track_flags);
    if (force_short_term) cfg.engine.mode = tdpa::TrackerMode::kShortTerm;
    auto in = open_input(track_stream);
    const tdpa::DetectionStream stream = tdpa::read_detection_stream(in);
    const auto preds = tdpa::run_track(cfg, stream.frames, track_ff_det);
    auto out = open_output(track_out);
    tdpa::write_predictions(out, {stream.header.frame_w, stream.header.frame_h}, preds);
  };
  auto* track_cmd = app.add_subcommand("track", "Run a tracker over a detection stream");
  add_track_common(track_cmd);
  track_cmd->add_option("--mode", track_flags.mode, "tdpa, argmax, or short_term");
  track_cmd->callback([&] { run_track_cmd(false); });
  auto* track_st_cmd = app.add_subcommand("track-st", "Run the short-term tracker over a detection stream");
  add_track_common(track_st_cmd);
  track_st_cmd->callback([&] { run_track_cmd(true); });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a prediction file against ground truth");
  std::string eval_preds, eval_truth, eval_out = "-", eval_curves;
  eval_cmd->add_option("--preds", eval_preds, "Prediction stream")->required();
  eval_cmd->add_option("--truth", eval_truth, "Ground truth stream")->required();
  eval_cmd->add_option("--out", eval_out, "Report JSON path, or - for stdout");
  eval_cmd->add_option("--curves", eval_curves, "Directory for per-threshold curve CSVs");
  eval_cmd->callback([&] {
    auto pred_in = open_input(eval_preds);
    const tdpa::PredictionFile preds = tdpa::read_predictions(pred_in);
    auto truth_in = open_input(eval_truth);
    const std::vector<tdpa::TruthRecord> truth = tdpa::read_truth(truth_in);
    const tdpa::EvalReport report = tdpa::evaluate(preds.records, truth, preds.dims);
    write_report(report, eval_out);
    if (!eval_curves.empty()) write_curves(preds.records, truth, eval_curves);
  });

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "Mine positives and video-diverse hard negatives from a gallery");
  std::string mine_gallery, mine_out;
  std::int64_t mine_video = 0;
  std::optional<std::int64_t> mine_query_frame;
  std::size_t mine_k = 10000, mine_videos = 100, mine_positives = 30;
  std::int64_t mine_seed = 0;
  bool mine_approx = false;
  double mine_probe = 0.5;
  mine_cmd->add_option("--gallery", mine_gallery, "Gallery ND-JSON")->required();
  mine_cmd->add_option("--video", mine_video, "Reference video id")->required();
  mine_cmd->add_option("--query-frame", mine_query_frame, "Query the reference box of this frame (default: its first frame)");
  mine_cmd->add_option("--k", mine_k, "Nearest neighbors to retrieve");
  mine_cmd->add_option("--videos", mine_videos, "Distinct videos to sample negatives from");
  mine_cmd->add_option("--positives", mine_positives, "Positive frames to sample from the reference video");
  mine_cmd->add_option("--seed", mine_seed, "Sampling seed");
  mine_cmd->add_flag("--approx", mine_approx, "Use the cluster-pruning index instead of exact search");
  mine_cmd->add_option("--probe", mine_probe, "Fraction of clusters probed in approximate mode");
  mine_cmd->add_option("--out", mine_out, "Mined example output path")->required();
  mine_cmd->callback([&] {
    auto in = open_input(mine_gallery);
    const tdpa::Gallery gallery(tdpa::read_gallery(in));
    if (!gallery.has_video(mine_video)) {
      throw tdpa::ValidationError("mine: reference video not present in the gallery");
    }
    const tdpa::GalleryEntry* query = nullptr;
    for (const tdpa::GalleryEntry& e : gallery.entries()) {
      if (e.video_id != mine_video) continue;
      if (mine_query_frame) {
        if (e.frame == *mine_query_frame && (!query || e.entry_id < query->entry_id)) query = &e;
      } else if (!query || e.frame < query->frame ||
                 (e.frame == query->frame && e.entry_id < query->entry_id)) {
        query = &e;
      }
    }
    if (!query) throw tdpa::ValidationError("mine: no reference box at the requested frame");
    std::vector<tdpa::GalleryEntry> neighbors;
    if (mine_approx) {
      const tdpa::ClusteredIndex index(gallery, mine_probe);
      neighbors = index.query(query->embedding, mine_k, mine_video);
    } else {
      neighbors = tdpa::knn_query(gallery, query->embedding, mine_k, mine_video);
    }
    const auto negatives = tdpa::sample_negatives(neighbors, mine_videos, static_cast<std::uint64_t>(mine_seed));
    const auto positives =
        tdpa::sample_positives(gallery, mine_video, mine_positives, static_cast<std::uint64_t>(mine_seed));
    auto out = open_output(mine_out);
    tdpa::write_mined(out, positives, negatives);
  });

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "simulate + track + eval in one run");
  std::string pipe_preset, pipe_scenario, pipe_config, pipe_mode, pipe_out = "-", pipe_keep;
  std::optional<std::int64_t> pipe_seed;
  bool pipe_reset = false;
  pipe_cmd->add_option("--preset", pipe_preset, "Built-in scenario name");
  pipe_cmd->add_option("--scenario", pipe_scenario, "Scenario JSON file");
  pipe_cmd->add_option("--config", pipe_config, "Tracker config JSON");
  pipe_cmd->add_option("--mode", pipe_mode, "Override tracker mode");
  pipe_cmd->add_option("--seed", pipe_seed, "One seed for both the scenario and the tracker");
  pipe_cmd->add_option("--out", pipe_out, "Report JSON path, or - for stdout");
  pipe_cmd->add_option("--keep", pipe_keep, "Directory to retain intermediate files in");
  pipe_cmd->add_flag("--reset-eval", pipe_reset, "Also run the reset-based protocol");
  pipe_cmd->callback([&] {
    const tdpa::ScenarioSpec spec = load_scenario(pipe_preset, pipe_scenario, pipe_seed);
    CommonTrackFlags flags;
    flags.config_path = pipe_config;
    flags.mode = pipe_mode;
    flags.seed = pipe_seed;
    const tdpa::EngineConfig cfg = load_config(flags);
    const tdpa::PipelineResult result = tdpa::run_pipeline(spec, cfg, pipe_reset);
    write_report(result.report, pipe_out);
    if (!pipe_keep.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(pipe_keep);
      write_stream_files(result.sim, spec.objects.front().embedding_prototype.size(),
                         (fs::path(pipe_keep) / "stream.ndjson").string(),
                         (fs::path(pipe_keep) / "truth.ndjson").string());
      auto pred_out = open_output((fs::path(pipe_keep) / "predictions.ndjson").string());
      tdpa::write_predictions(pred_out, result.sim.dims, result.predictions);
      open_output((fs::path(pipe_keep) / "scenario.json").string()) << tdpa::scenario_to_json(spec).dump(2) << '\n';
      open_output((fs::path(pipe_keep) / "config.json").string()) << tdpa::config_to_json(cfg).dump(2) << '\n';
    }
  });

  // defaults
  auto* defaults_cmd = app.add_subcommand("defaults", "Print the default configuration as JSON");
  std::string defaults_out = "-";
  defaults_cmd->add_option("--out", defaults_out, "Output path, or - for stdout");
  defaults_cmd->callback([&] {
    const Json j = tdpa::config_to_json(tdpa::EngineConfig{});
    if (defaults_out == "-") {
      std::cout << j.dump(2) << '\n';
    } else {
      open_output(defaults_out) << j.dump(2) << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit clean; bad flags are input errors
  } catch (const tdpa::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
