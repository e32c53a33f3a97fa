#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/records.hpp"
#include "tdpa/tracklet.hpp"

namespace tdpa {

/// Weights of the track-scoring dynamic program and the temporal cap on how
/// far back a tracklet may link to its predecessor.
struct DpParams {
  double w_ff = 0.5;
  double w_loc = 1.0;
  std::int64_t max_gap = 1500;
};

/// Per-detection quality term: convex combination of the re-detection scores
/// against the first-frame template and against the template tracklet's most
/// recent detection. Expression shape is fixed; tests compare scores bitwise.
inline double detection_unary(const Detection& d, double w_ff) {
  return w_ff * d.ff_score + (1.0 - w_ff) * d.ff_tracklet_score;
}

/// Tracklet quality: per-detection unaries summed left to right in time order.
inline double unary(const Tracklet& tr, double w_ff) {
  double acc = 0.0;
  for (const Detection& d : tr.detections()) acc += detection_unary(d, w_ff);
  return acc;
}

/// Spatial continuity between consecutive tracklets of a track: negative L1
/// distance between where `a` ended and where `b` began.
inline double loc_score_tracklets(const Tracklet& a, const Tracklet& b) {
  if (a.end() >= b.start()) throw ValidationError("loc_score_tracklets: tracklets overlap in time");
  return loc_score_boxes(a.end_box(), b.start_box());
}

/// Per-frame tracker output: the selected tracklet's box, with presence and
/// confidence downgraded when that tracklet has no detection at the current
/// frame.
struct SelectedOutput {
  BBox box;
  double confidence = 0.0;
  bool present = false;
  std::int64_t tracklet_id = 0;
};

/// Best-prefix DP score per tracklet with predecessor links, maintained
/// incrementally:
///
///   theta[a] = unary(a) + max over {ã : end(ã) < start(a),
///                                   start(a) − end(ã) <= max_gap}
///              of theta[ã] + w_loc · loc_score(ã, a),
///
/// with theta pinned to 0 for the tracklet containing the first-frame
/// template, and −inf for tracklets with no admissible predecessor.
///
/// Two structural facts keep the update cheap. Admissible predecessors end
/// strictly before the successor starts, so they are frozen with final theta
/// by the time the successor is created; the predecessor max can therefore be
/// cached at creation, and extending a tracklet only adds its new detection's
/// unary. And tracklets whose theta is −inf can never be a predecessor of a
/// finite-theta tracklet nor the argmax, so the frozen index simply omits
/// them.
class ThetaTable {
public:
  ThetaTable(const TrackletStore& store, DpParams params) : params_(std::move(params)) {
    if (!store.initialized() || store.size() != 1) {
      throw ValidationError("ThetaTable: store must contain exactly the template tracklet");
    }
    if (params_.w_ff < 0.0 || params_.w_ff > 1.0) throw ValidationError("ThetaTable: w_ff outside [0,1]");
    if (params_.max_gap < 1) throw ValidationError("ThetaTable: max_gap must be >= 1");
    theta_ = {0.0};
    pred_ = {-1};
    best_contrib_ = {0.0};
    unary_acc_ = {0.0};
    counted_ = {0};
    live_ = {TrackletStore::ff_id()};
  }

  const DpParams& params() const { return params_; }
  double theta(std::int64_t id) const { return theta_[static_cast<std::size_t>(id)]; }
  std::optional<std::int64_t> pred(std::int64_t id) const {
    const std::int64_t p = pred_[static_cast<std::size_t>(id)];
    if (p < 0) return std::nullopt;
    return p;
  }
  std::size_t size() const { return theta_.size(); }
  std::int64_t theta_writes_last_update() const { return writes_; }

  /// Folds one frame's tracklet changes into the table. Must be called with
  /// the result of the corresponding TrackletStore::update.
  void update(const TrackletStore& store, const TrackletStore::UpdateResult& delta) {
    writes_ = 0;

    // Freezes first: a tracklet created this frame may link to one frozen
    // this frame. Frozen theta values are final; unreachable ones are
    // useless as predecessors and are dropped here.
    for (std::int64_t id : delta.newly_frozen) {
      const double th = theta_[static_cast<std::size_t>(id)];
      if (th == kNegInf) continue;
      const Tracklet& tr = store.tracklet(id);
      by_end_.push_back(FrozenEntry{tr.end(), id, th, tr.end_box()});
      if (!frozen_best_ || frozen_better(by_end_.back(), *frozen_best_)) {
        frozen_best_ = by_end_.back();
      }
    }

    const std::size_t old_size = theta_.size();
    theta_.resize(store.size(), kNegInf);
    pred_.resize(store.size(), -1);
    best_contrib_.resize(store.size(), kNegInf);
    unary_acc_.resize(store.size(), 0.0);
    counted_.resize(store.size(), 0);

    for (std::int64_t id : delta.changed) {
      const auto idx = static_cast<std::size_t>(id);
      const Tracklet& tr = store.tracklet(id);
      if (id == TrackletStore::ff_id()) continue;  // theta pinned to 0

      for (const auto& dets = tr.detections(); counted_[idx] < dets.size(); ++counted_[idx]) {
        unary_acc_[idx] += detection_unary(dets[counted_[idx]], params_.w_ff);
      }
      if (idx >= old_size) {
        scan_predecessors(tr, idx);
      }
      theta_[idx] = unary_acc_[idx] + best_contrib_[idx];
      ++writes_;
    }

    live_ = delta.changed;
  }

  /// The frame-t output: argmax-theta tracklet, preferring the template
  /// tracklet then the lowest id on exact ties. A tracklet still alive at t
  /// contributes its current detection (present, confidence = that
  /// detection's unary); a frozen winner contributes its last known box with
  /// confidence 0.
  SelectedOutput select_output(const TrackletStore& store, std::int64_t t) const {
    if (t != store.current_frame()) throw ValidationError("select_output: table not at frame t");
    const std::int64_t best = select_id();
    const Tracklet& tr = store.tracklet(best);
    SelectedOutput out;
    out.tracklet_id = best;
    if (tr.end() == t) {
      const Detection& d = tr.detections().back();
      out.box = d.box;
      out.confidence = detection_unary(d, params_.w_ff);
      out.present = true;
    } else {
      out.box = tr.end_box();
      out.confidence = 0.0;
      out.present = false;
    }
    return out;
  }

  /// Predecessor-chain walk from the current argmax back to the template
  /// tracklet; returned ids are in track order (template first).
  std::vector<std::int64_t> reconstruct_track() const {
    std::vector<std::int64_t> ids;
    for (std::int64_t id = select_id(); id >= 0; id = pred_[static_cast<std::size_t>(id)]) {
      ids.push_back(id);
    }
    std::reverse(ids.begin(), ids.end());
    return ids;
  }

private:
  struct FrozenEntry {
    std::int64_t end;
    std::int64_t id;
    double theta;
    BBox end_box;
  };

  // Ties break toward the template tracklet, then the lowest id; the
  // template has id 0, so lowest id covers both.
  static bool frozen_better(const FrozenEntry& a, const FrozenEntry& b) {
    if (a.theta != b.theta) return a.theta > b.theta;
    return a.id < b.id;
  }

  /// Best predecessor over frozen tracklets ending within the gap window
  /// before tr's start. by_end_ is append-ordered by freeze frame, hence
  /// sorted by end time; the window is located by binary search.
  void scan_predecessors(const Tracklet& tr, std::size_t idx) {
    const std::int64_t start = tr.start();
    const std::int64_t lo_end = start - params_.max_gap;
    auto lo = std::lower_bound(by_end_.begin(), by_end_.end(), lo_end,
                               [](const FrozenEntry& e, std::int64_t v) { return e.end < v; });
    auto hi = std::lower_bound(lo, by_end_.end(), start,
                               [](const FrozenEntry& e, std::int64_t v) { return e.end < v; });
    double best = kNegInf;
    std::int64_t best_id = -1;
    for (auto it = lo; it != hi; ++it) {
      const double contrib = it->theta + params_.w_loc * loc_score_boxes(it->end_box, tr.start_box());
      if (contrib > best) {
        best = contrib;
        best_id = it->id;
      }
    }
    best_contrib_[idx] = best;
    pred_[idx] = best_id;
  }

  std::int64_t select_id() const {
    std::int64_t best_id = -1;
    double best_theta = kNegInf;
    auto consider = [&](std::int64_t id, double th) {
      if (best_id < 0 || th > best_theta || (th == best_theta && id < best_id)) {
        best_id = id;
        best_theta = th;
      }
    };
    if (frozen_best_) consider(frozen_best_->id, frozen_best_->theta);
    for (std::int64_t id : live_) consider(id, theta_[static_cast<std::size_t>(id)]);
    return best_id;
  }

  DpParams params_;
  std::vector<double> theta_;
  std::vector<std::int64_t> pred_;      // -1 = no predecessor
  std::vector<double> best_contrib_;    // cached predecessor max, fixed at creation
  std::vector<double> unary_acc_;       // running unary sum, left to right
  std::vector<std::size_t> counted_;    // detections already folded into unary_acc_
  std::vector<FrozenEntry> by_end_;     // finite-theta frozen tracklets, sorted by end
  std::optional<FrozenEntry> frozen_best_;
  std::vector<std::int64_t> live_;      // tracklets ending at the current frame
  std::int64_t writes_ = 0;
};

}  // namespace tdpa
