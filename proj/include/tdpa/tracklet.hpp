#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/records.hpp"

namespace tdpa {

/// Extension thresholds for the per-frame tracklet update: a detection joins
/// a tracklet only when its best pairwise score clears `alpha` and beats
/// every competing pairing by at least `beta`; `gamma` is the spatial gate
/// applied when the pairwise matrix is built.
struct BuilderParams {
  double alpha = 0.5;
  double beta = 0.1;
  double gamma = 0.3;
};

/// A gap-free run of detections, one per frame, almost certainly belonging to
/// one object. Terminated (frozen) as soon as a frame passes without an
/// unambiguous extension.
class Tracklet {
public:
  Tracklet(std::int64_t id, bool is_ff, Detection first) : id_(id), is_ff_(is_ff) {
    dets_.push_back(std::move(first));
  }

  std::int64_t id() const { return id_; }
  bool is_ff() const { return is_ff_; }
  bool frozen() const { return frozen_; }
  std::int64_t start() const { return dets_.front().t; }
  std::int64_t end() const { return dets_.back().t; }
  std::int64_t length() const { return static_cast<std::int64_t>(dets_.size()); }
  const std::vector<Detection>& detections() const { return dets_; }
  const BBox& start_box() const { return dets_.front().box; }
  const BBox& end_box() const { return dets_.back().box; }

private:
  friend class TrackletStore;

  void append(Detection d) { dets_.push_back(std::move(d)); }

  std::int64_t id_;
  bool is_ff_;
  bool frozen_ = false;
  std::vector<Detection> dets_;
};

/// Per-frame tracklet update. For each current detection d:
///
///   s1 = best pairwise score against the previous frame's detections,
///   s2 = best score of any OTHER current detection against that argmax,
///   s3 = best score of d against any OTHER previous detection;
///
/// d extends the argmax's tracklet iff s1 > alpha and s2 <= s1 - beta and
/// s3 <= s1 - beta, otherwise it starts a new single-detection tracklet.
/// Maxima over empty sets are -inf, so an empty previous frame spawns
/// tracklets for everything. Argmax ties break toward the lowest previous
/// det_id; if two current detections both claim the same tracklet (possible
/// only at beta = 0 with exactly tied scores), the later one spawns instead
/// so a tracklet never gains two detections in one frame.
class TrackletStore {
public:
  struct UpdateResult {
    std::vector<std::int64_t> changed;       // extended or created this frame, ascending id
    std::vector<std::int64_t> newly_frozen;  // ascending id
  };

  TrackletStore() = default;

  /// Seeds the store with the first-frame template detection.
  void init(const Detection& ff_detection) {
    if (!tracklets_.empty()) throw ValidationError("TrackletStore: already initialized");
    tracklets_.emplace_back(0, /*is_ff=*/true, ff_detection);
    prev_dets_ = {ff_detection};
    prev_owner_ = {0};
    live_ = {0};
    frame_ = ff_detection.t;
  }

  bool initialized() const { return !tracklets_.empty(); }
  std::size_t size() const { return tracklets_.size(); }
  std::int64_t current_frame() const { return frame_; }
  static constexpr std::int64_t ff_id() { return 0; }

  const Tracklet& tracklet(std::int64_t id) const { return tracklets_[static_cast<std::size_t>(id)]; }
  const std::vector<Tracklet>& tracklets() const { return tracklets_; }

  /// Detections of the most recently processed frame, the dets_{t-1} the next
  /// update matches against.
  std::span<const Detection> prev_frame_detections() const { return prev_dets_; }

  UpdateResult update(std::vector<Detection> dets_t, const ScoreMatrix& pairwise, const BuilderParams& params) {
    if (tracklets_.empty()) throw ValidationError("TrackletStore: update before init");
    if (pairwise.rows != dets_t.size() || pairwise.cols != prev_dets_.size()) {
      throw ValidationError("TrackletStore: pairwise matrix shape mismatch");
    }
    const std::int64_t t = frame_ + 1;
    for (const Detection& d : dets_t) {
      if (d.t != t) throw ValidationError("TrackletStore: detection timestamp out of order");
    }

    UpdateResult result;
    std::vector<std::int64_t> new_owner(dets_t.size(), -1);
    std::vector<bool> extended(tracklets_.size(), false);

    for (std::size_t i = 0; i < dets_t.size(); ++i) {
      double s1 = kNegInf;
      std::size_t jhat = 0;
      bool have_jhat = false;
      for (std::size_t j = 0; j < pairwise.cols; ++j) {
        const double s = pairwise.at(i, j);
        const bool better = !have_jhat || s > s1 ||
                            (s == s1 && prev_dets_[j].det_id < prev_dets_[jhat].det_id);
        if (better) {
          s1 = s;
          jhat = j;
          have_jhat = true;
        }
      }

      bool extend = false;
      if (have_jhat && s1 > params.alpha) {
        double s2 = kNegInf;
        for (std::size_t i2 = 0; i2 < pairwise.rows; ++i2) {
          if (i2 != i) s2 = std::max(s2, pairwise.at(i2, jhat));
        }
        double s3 = kNegInf;
        for (std::size_t j = 0; j < pairwise.cols; ++j) {
          if (j != jhat) s3 = std::max(s3, pairwise.at(i, j));
        }
        extend = s2 <= s1 - params.beta && s3 <= s1 - params.beta;
      }

      if (extend) {
        const std::int64_t owner = prev_owner_[jhat];
        if (extended[static_cast<std::size_t>(owner)]) {
          extend = false;  // one detection per tracklet per frame
        } else {
          tracklets_[static_cast<std::size_t>(owner)].append(dets_t[i]);
          extended[static_cast<std::size_t>(owner)] = true;
          new_owner[i] = owner;
        }
      }
      if (!extend) {
        const auto id = static_cast<std::int64_t>(tracklets_.size());
        tracklets_.emplace_back(id, /*is_ff=*/false, dets_t[i]);
        new_owner[i] = id;
      }
      result.changed.push_back(new_owner[i]);
    }

    // Live tracklets that were not extended this frame are terminated.
    for (std::int64_t id : live_) {
      if (tracklets_[static_cast<std::size_t>(id)].end() < t) {
        tracklets_[static_cast<std::size_t>(id)].frozen_ = true;
        result.newly_frozen.push_back(id);
      }
    }

    std::sort(result.changed.begin(), result.changed.end());
    std::sort(result.newly_frozen.begin(), result.newly_frozen.end());
    live_ = result.changed;
    prev_dets_ = std::move(dets_t);
    prev_owner_ = std::move(new_owner);
    frame_ = t;
    return result;
  }

private:
  std::vector<Tracklet> tracklets_;
  std::vector<Detection> prev_dets_;
  std::vector<std::int64_t> prev_owner_;  // tracklet id per prev_dets_ entry
  std::vector<std::int64_t> live_;        // tracklets with end == frame_
  std::int64_t frame_ = -1;
};

}  // namespace tdpa
