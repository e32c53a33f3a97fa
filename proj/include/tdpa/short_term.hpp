#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/records.hpp"

namespace tdpa {

/// Short-term stepping: combined scoring of candidates against the template
/// and the previous-frame result, with a location penalty and a hard spatial
/// cutoff.
struct ShortTermParams {
  double delta = -1.0;  // weight of the L1 distance to the previous box; negative penalizes jumps
  double xi = 0.5;      // candidates farther than this (L-infinity) from the previous box are discarded
  std::vector<double> shift_grid = {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
};

inline void validate(const ShortTermParams& p) {
  if (!(p.xi > 0.0)) throw ValidationError("ShortTermParams: xi must be > 0");
  if (p.shift_grid.empty()) throw ValidationError("ShortTermParams: shift_grid must be non-empty");
  if (std::find(p.shift_grid.begin(), p.shift_grid.end(), 0.0) == p.shift_grid.end()) {
    throw ValidationError("ShortTermParams: shift_grid must contain 0.0");
  }
}

/// The |grid|^2 candidate boxes around `prev`, shifted by grid fractions of
/// its own width and height (y-shift outer, x-shift inner; the (0,0) entry
/// reproduces `prev`). Boxes near the frame edge come back clamped.
inline std::vector<BBox> shifted_proposals(const BBox& prev, const std::vector<double>& grid) {
  std::vector<BBox> out;
  out.reserve(grid.size() * grid.size());
  for (double sy : grid) {
    for (double sx : grid) {
      out.emplace_back(prev.x + sx * prev.w, prev.y + sy * prev.h, prev.w, prev.h);
    }
  }
  return out;
}

/// One short-term tracking step. Each candidate is scored
///
///   score = (score vs. template) + (score vs. previous result)
///           + delta * L1(candidate box, previous box),
///
/// candidates farther than `xi` (L-infinity) from the previous box are
/// discarded, and the best survivor wins (first index on exact ties). With no
/// survivors, or no candidates at all, the previous result is carried forward
/// unchanged.
inline Detection short_term_step(const Detection& prev_det, const std::vector<Detection>& candidates,
                                 const ShortTermParams& params, const SimilarityOracle& oracle,
                                 const Detection& ff_detection, std::uint64_t seed) {
  validate(params);
  std::size_t best = candidates.size();
  double best_score = kNegInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Detection& c = candidates[i];
    if (spatial_distance(c.box, prev_det.box) > params.xi) continue;
    const double det_score = oracle.score_one(c, ff_detection, seed);
    const double prev_score = oracle.score_one(c, prev_det, seed);
    const double loc = -loc_score_boxes(c.box, prev_det.box);  // L1 distance, nonnegative
    const double score = det_score + prev_score + params.delta * loc;
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  if (best == candidates.size()) return prev_det;
  return candidates[best];
}

}  // namespace tdpa
