#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tdpa/dp.hpp"
#include "tdpa/errors.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/records.hpp"
#include "tdpa/short_term.hpp"
#include "tdpa/tracklet.hpp"

namespace tdpa {

/// tdpa: full tracklet building plus dynamic-programming selection.
/// argmax: per-frame highest template score, no tracklets (ablation mode).
/// short_term: previous-result-anchored combined scoring with spatial cutoff.
enum class TrackerMode { kTdpa, kArgmax, kShortTerm };

struct EngineParams {
  BuilderParams builder;
  DpParams dp;
  ShortTermParams short_term;
  TrackerMode mode = TrackerMode::kTdpa;
  std::uint64_t seed = 0;
};

/// Streaming single-target tracker over abstract detection streams. Feed the
/// template detection first, then one frame at a time; every frame yields one
/// prediction. object_id is passed through from the selected detection so
/// identity metrics can audit the result on simulated streams.
class TrackingEngine {
public:
  TrackingEngine(EngineParams params, SimilarityOracle oracle)
      : params_(std::move(params)), oracle_(std::move(oracle)) {
    validate(params_.short_term);
  }

  /// Seeds the tracker with the first-frame template. Any other detections
  /// of that frame are ignored: the template is ground truth, competitors at
  /// frame 0 carry no information about it.
  PredictionRecord init(const Detection& ff_detection) {
    if (initialized_) throw ValidationError("TrackingEngine: already initialized");
    ff_det_ = ff_detection;
    ff_det_.ff_tracklet_score = oracle_.score_one(ff_det_, ff_det_, params_.seed);
    initialized_ = true;
    frame_ = ff_det_.t;

    switch (params_.mode) {
      case TrackerMode::kTdpa:
        store_.init(ff_det_);
        theta_.emplace(store_, params_.dp);
        tail_ = ff_det_;
        return emit(theta_->select_output(store_, frame_), frame_);
      case TrackerMode::kArgmax:
      case TrackerMode::kShortTerm: {
        prev_ = ff_det_;
        PredictionRecord rec;
        rec.t = frame_;
        rec.box = ff_det_.box;
        rec.confidence = ff_det_.ff_score;
        rec.present = true;
        rec.object_id = ff_det_.object_id;
        return rec;
      }
    }
    throw ValidationError("TrackingEngine: unknown mode");
  }

  /// Processes the detections of frame t (strictly one past the last frame
  /// seen) and returns the tracker's output for it.
  PredictionRecord step(std::int64_t t, std::vector<Detection> dets) {
    if (!initialized_) throw ValidationError("TrackingEngine: step before init");
    if (t != frame_ + 1) throw ValidationError("TrackingEngine: frames must advance one at a time");
    frame_ = t;
    switch (params_.mode) {
      case TrackerMode::kTdpa:
        return step_tdpa(t, std::move(dets));
      case TrackerMode::kArgmax:
        return step_argmax(t, dets);
      case TrackerMode::kShortTerm:
        return step_short_term(t, dets);
    }
    throw ValidationError("TrackingEngine: unknown mode");
  }

  const TrackletStore& store() const { return store_; }
  const ThetaTable& theta() const { return *theta_; }
  const Detection& template_detection() const { return ff_det_; }
  std::int64_t current_frame() const { return frame_; }

private:
  PredictionRecord step_tdpa(std::int64_t t, std::vector<Detection> dets) {
    // ff_tracklet_score is fixed at detection creation time, against the
    // template tracklet's most recent detection as of the previous frame.
    for (Detection& d : dets) {
      d.ff_tracklet_score = oracle_.score_one(d, tail_, params_.seed);
    }
    const ScoreMatrix pairwise =
        oracle_.pairwise_gated_scores(dets, store_.prev_frame_detections(), params_.builder.gamma, params_.seed);
    const TrackletStore::UpdateResult delta = store_.update(std::move(dets), pairwise, params_.builder);
    const Tracklet& ff = store_.tracklet(TrackletStore::ff_id());
    if (ff.end() == t) tail_ = ff.detections().back();
    theta_->update(store_, delta);
    return emit(theta_->select_output(store_, t), t);
  }

  PredictionRecord step_argmax(std::int64_t t, const std::vector<Detection>& dets) {
    const Detection* best = nullptr;
    for (const Detection& d : dets) {
      if (!best || d.ff_score > best->ff_score ||
          (d.ff_score == best->ff_score && d.det_id < best->det_id)) {
        best = &d;
      }
    }
    PredictionRecord rec;
    rec.t = t;
    if (best) {
      prev_ = *best;
      rec.box = best->box;
      rec.confidence = best->ff_score;
      rec.present = true;
      rec.object_id = best->object_id;
    } else {
      rec.box = prev_.box;
      rec.confidence = 0.0;
      rec.present = false;
    }
    return rec;
  }

  PredictionRecord step_short_term(std::int64_t t, const std::vector<Detection>& dets) {
    const Detection picked = short_term_step(prev_, dets, params_.short_term, oracle_, ff_det_, params_.seed);
    // det_ids are unique across a stream, so an unchanged id means the
    // previous result was carried forward (no candidate survived the cutoff).
    const bool carried = picked.det_id == prev_.det_id;
    PredictionRecord rec;
    rec.t = t;
    rec.box = picked.box;
    rec.confidence = carried ? 0.0 : oracle_.score_one(picked, ff_det_, params_.seed);
    rec.present = !carried;
    if (!carried) rec.object_id = picked.object_id;
    prev_ = picked;
    return rec;
  }

  PredictionRecord emit(const SelectedOutput& out, std::int64_t t) {
    PredictionRecord rec;
    rec.t = t;
    rec.box = out.box;
    rec.confidence = out.confidence;
    rec.present = out.present;
    if (out.present) {
      rec.object_id = store_.tracklet(out.tracklet_id).detections().back().object_id;
    }
    return rec;
  }

  EngineParams params_;
  SimilarityOracle oracle_;
  bool initialized_ = false;
  std::int64_t frame_ = 0;
  Detection ff_det_;

  // tdpa mode
  TrackletStore store_;
  std::optional<ThetaTable> theta_;
  Detection tail_;  // template tracklet's most recent detection

  // argmax / short_term modes
  Detection prev_;
};

}  // namespace tdpa
