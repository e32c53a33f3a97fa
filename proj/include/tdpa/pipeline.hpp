#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tdpa/config.hpp"
#include "tdpa/engine.hpp"
#include "tdpa/errors.hpp"
#include "tdpa/metrics.hpp"
#include "tdpa/simulator.hpp"
#include "tdpa/stream_io.hpp"

namespace tdpa {

/// Drives a tracker over a whole detection stream. The template is the
/// frame-0 detection named by ff_det_id, or the first frame-0 detection when
/// unset; one prediction per frame comes back.
inline std::vector<PredictionRecord> run_track(const EngineConfig& cfg,
                                               const std::vector<std::vector<Detection>>& frames,
                                               std::optional<std::int64_t> ff_det_id = std::nullopt) {
  if (frames.empty()) throw ValidationError("run_track: empty stream");
  if (frames.front().empty()) throw ValidationError("run_track: frame 0 has no detection to initialize from");
  const Detection* ff = nullptr;
  if (ff_det_id) {
    for (const Detection& d : frames.front()) {
      if (d.det_id == *ff_det_id) ff = &d;
    }
    if (!ff) throw ValidationError("run_track: no frame-0 detection with the requested det_id");
  } else {
    ff = &frames.front().front();
  }

  TrackingEngine engine(cfg.engine, cfg.oracle);
  std::vector<PredictionRecord> preds;
  preds.reserve(frames.size());
  preds.push_back(engine.init(*ff));
  for (std::size_t t = 1; t < frames.size(); ++t) {
    preds.push_back(engine.step(static_cast<std::int64_t>(t), frames[t]));
  }
  return preds;
}

struct PipelineResult {
  SimulationResult sim;
  std::vector<PredictionRecord> predictions;
  EvalReport report;
};

/// simulate -> track -> evaluate in one call. The template is the target's
/// own frame-0 detection. With with_reset_eval, the reset-based protocol
/// additionally re-drives fresh tracker instances over the stream.
inline PipelineResult run_pipeline(const ScenarioSpec& spec, const EngineConfig& cfg,
                                   bool with_reset_eval = false) {
  PipelineResult result;
  result.sim = generate(spec, cfg.oracle);

  std::optional<std::int64_t> ff_det_id;
  for (const Detection& d : result.sim.frames.front()) {
    if (d.object_id && *d.object_id == result.sim.target_id) ff_det_id = d.det_id;
  }
  if (!ff_det_id) {
    throw ValidationError("run_pipeline: the target has no frame-0 detection to initialize from "
                          "(is it visible at t=0, with miss_rate leaving it intact?)");
  }

  result.predictions = run_track(cfg, result.sim.frames, ff_det_id);
  result.report = evaluate(result.predictions, result.sim.truth, result.sim.dims);

  if (with_reset_eval) {
    const ResetEval reset = reset_based_eval(
        [&cfg](const Detection& tmpl) {
          TrackingEngine engine(cfg.engine, cfg.oracle);
          engine.init(tmpl);
          return engine;
        },
        result.sim.frames, result.sim.truth);
    result.report.resets = reset.resets;
    result.report.reset_accuracy = reset.reset_accuracy;
  }
  return result;
}

}  // namespace tdpa
