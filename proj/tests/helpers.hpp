#pragma once

// Shared test oracles. Everything here is written against the documented
// behavior, not the production code paths: chain scores come from exhaustive
// enumeration, nearest neighbors from a full sort, short-term picks from
// dense re-scoring. Failures throw std::runtime_error so both the Catch2
// suite and the standalone acceptance gate can use them.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tdpa/dp.hpp"
#include "tdpa/mining.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/random.hpp"
#include "tdpa/short_term.hpp"
#include "tdpa/tracklet.hpp"

namespace tdpa_test {

inline tdpa::Detection make_det(std::int64_t t, std::int64_t det_id, const tdpa::BBox& box, double ff = 0.0,
                                double fft = 0.0) {
  tdpa::Detection d;
  d.t = t;
  d.det_id = det_id;
  d.box = box;
  d.ff_score = ff;
  d.ff_tracklet_score = fft;
  return d;
}

/// Best chain score ending at every tracklet, by walking every valid chain
/// rooted at the template tracklet. The template contributes score 0; each
/// link adds the successor's unary and the weighted location score. Throws
/// when the chain count explodes past `budget` (a test sizing bug).
inline std::vector<double> brute_theta(const tdpa::TrackletStore& store, const tdpa::DpParams& p,
                                       std::size_t budget = 20'000'000) {
  const auto& trks = store.tracklets();
  std::vector<double> unary_sums(trks.size());
  for (std::size_t i = 0; i < trks.size(); ++i) {
    double acc = 0.0;
    for (const tdpa::Detection& d : trks[i].detections()) {
      acc += p.w_ff * d.ff_score + (1.0 - p.w_ff) * d.ff_tracklet_score;
    }
    unary_sums[i] = acc;
  }

  std::vector<double> best(trks.size(), tdpa::kNegInf);
  best[0] = 0.0;
  std::size_t visited = 0;
  auto dfs = [&](auto&& self, std::size_t at, double score) -> void {
    if (++visited > budget) throw std::runtime_error("brute_theta: enumeration budget exceeded");
    for (std::size_t nxt = 1; nxt < trks.size(); ++nxt) {
      if (trks[at].end() >= trks[nxt].start()) continue;
      if (trks[nxt].start() - trks[at].end() > p.max_gap) continue;
      const double chained = unary_sums[nxt] + (score + p.w_loc * tdpa::loc_score_tracklets(trks[at], trks[nxt]));
      if (chained > best[nxt]) best[nxt] = chained;
      self(self, nxt, chained);
    }
  };
  dfs(dfs, 0, 0.0);
  return best;
}

/// Recomputes the chain score of an explicit tracklet id sequence, validating
/// the chain along the way.
inline double rescore_chain(const tdpa::TrackletStore& store, const tdpa::DpParams& p,
                            const std::vector<std::int64_t>& ids) {
  if (ids.empty() || ids.front() != tdpa::TrackletStore::ff_id()) {
    throw std::runtime_error("rescore_chain: chain must start at the template tracklet");
  }
  double score = 0.0;
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const tdpa::Tracklet& a = store.tracklet(ids[k - 1]);
    const tdpa::Tracklet& b = store.tracklet(ids[k]);
    if (a.end() >= b.start()) throw std::runtime_error("rescore_chain: chain overlaps in time");
    if (b.start() - a.end() > p.max_gap) throw std::runtime_error("rescore_chain: chain exceeds max_gap");
    double un = 0.0;
    for (const tdpa::Detection& d : b.detections()) {
      un += p.w_ff * d.ff_score + (1.0 - p.w_ff) * d.ff_tracklet_score;
    }
    score = un + (score + p.w_loc * tdpa::loc_score_tracklets(a, b));
  }
  return score;
}

struct ExpectedSelect {
  std::int64_t id = 0;
  bool present = false;
  tdpa::BBox box;
  double confidence = 0.0;
};

/// Frame output derived from a theta vector alone: ascending-id scan with a
/// strict improvement keeps the lowest id on ties.
inline ExpectedSelect expected_select(const tdpa::TrackletStore& store, const std::vector<double>& theta,
                                      std::int64_t t, double w_ff) {
  std::size_t best = 0;
  for (std::size_t id = 1; id < theta.size(); ++id) {
    if (theta[id] > theta[best]) best = id;
  }
  const tdpa::Tracklet& tr = store.tracklet(static_cast<std::int64_t>(best));
  ExpectedSelect out;
  out.id = static_cast<std::int64_t>(best);
  if (tr.end() == t) {
    const tdpa::Detection& d = tr.detections().back();
    out.present = true;
    out.box = d.box;
    out.confidence = w_ff * d.ff_score + (1.0 - w_ff) * d.ff_tracklet_score;
  } else {
    out.present = false;
    out.box = tr.end_box();
    out.confidence = 0.0;
  }
  return out;
}

/// Frame source for randomized DP checks: a few detections per frame (often
/// zero) with quantized scores and random gating, so extensions, spawns, ties
/// and unreachable tracklets all occur.
class RandomDpStream {
public:
  explicit RandomDpStream(std::uint64_t seed) : rng_(seed, {0xD1CEu}) {}

  struct Frame {
    std::vector<tdpa::Detection> dets;
    tdpa::ScoreMatrix pairwise;
  };

  tdpa::Detection ff() {
    prev_count_ = 1;
    return make_det(0, next_det_id_++, random_box(), pick(kScorePalette), pick(kScorePalette));
  }

  Frame next(std::int64_t t) {
    Frame f;
    const std::size_t n = rng_.below(5);
    for (std::size_t i = 0; i < n; ++i) {
      f.dets.push_back(make_det(t, next_det_id_++, random_box(), pick(kScorePalette), pick(kScorePalette)));
    }
    f.pairwise = tdpa::ScoreMatrix(n, prev_count_);
    for (double& v : f.pairwise.values) {
      v = rng_.bernoulli(0.25) ? tdpa::kNegInf : pick(kPairPalette);
    }
    prev_count_ = n;
    return f;
  }

private:
  static constexpr double kScorePalette[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr double kPairPalette[] = {0.1, 0.45, 0.55, 0.62, 0.7, 0.7, 0.9};

  template <std::size_t N>
  double pick(const double (&palette)[N]) {
    return palette[rng_.below(N)];
  }

  tdpa::BBox random_box() {
    return tdpa::BBox(rng_.uniform(0.1, 0.9), rng_.uniform(0.1, 0.9), rng_.uniform(0.05, 0.2),
                      rng_.uniform(0.05, 0.2));
  }

  tdpa::Rng rng_;
  std::int64_t next_det_id_ = 0;
  std::size_t prev_count_ = 0;
};

/// Full-sort nearest neighbors: every eligible entry ranked by (squared
/// distance, entry id), first k kept.
inline std::vector<std::int64_t> knn_oracle(const tdpa::Gallery& gallery, const std::vector<float>& query,
                                            std::size_t k, std::int64_t exclude_video) {
  struct Row {
    double d;
    std::int64_t id;
  };
  std::vector<Row> rows;
  for (const tdpa::GalleryEntry& e : gallery.entries()) {
    if (e.video_id == exclude_video) continue;
    double d = 0.0;
    for (std::size_t i = 0; i < e.embedding.size(); ++i) {
      const double diff = static_cast<double>(e.embedding[i]) - static_cast<double>(query[i]);
      d += diff * diff;
    }
    rows.push_back({d, e.entry_id});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.d != b.d ? a.d < b.d : a.id < b.id;
  });
  if (rows.size() > k) rows.resize(k);
  std::vector<std::int64_t> ids;
  ids.reserve(rows.size());
  for (const Row& r : rows) ids.push_back(r.id);
  return ids;
}

/// Dense short-term reference: score every candidate, then apply the spatial
/// cutoff, then take the best surviving index (first on ties); carry the
/// previous result when nothing survives.
inline tdpa::Detection short_term_oracle(const tdpa::Detection& prev, const std::vector<tdpa::Detection>& cands,
                                         const tdpa::ShortTermParams& p, const tdpa::SimilarityOracle& oracle,
                                         const tdpa::Detection& ff, std::uint64_t seed) {
  std::vector<double> scores(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const double l1 = std::abs(cands[i].box.x - prev.box.x) + std::abs(cands[i].box.y - prev.box.y) +
                      std::abs(cands[i].box.w - prev.box.w) + std::abs(cands[i].box.h - prev.box.h);
    scores[i] = oracle.score_one(cands[i], ff, seed) + oracle.score_one(cands[i], prev, seed) + p.delta * l1;
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (tdpa::spatial_distance(cands[i].box, prev.box) > p.xi) continue;
    if (!best || scores[i] > scores[*best]) best = i;
  }
  return best ? cands[*best] : prev;
}

}  // namespace tdpa_test
