#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/random.hpp"

namespace tdpa {

/// One ground-truth box of some video, with its appearance embedding.
struct GalleryEntry {
  std::int64_t video_id = 0;
  std::int64_t frame = 0;
  BBox box;
  std::vector<float> embedding;
  std::int64_t entry_id = 0;
};

/// Immutable embedding gallery. Construction validates that embeddings share
/// one dimension and entry ids are unique; afterwards queries are read-only
/// and safe to run concurrently.
class Gallery {
public:
  explicit Gallery(std::vector<GalleryEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("Gallery: no entries");
    dim_ = entries_.front().embedding.size();
    if (dim_ == 0) throw ValidationError("Gallery: empty embedding");
    std::unordered_set<std::int64_t> ids;
    for (const GalleryEntry& e : entries_) {
      if (e.embedding.size() != dim_) throw ValidationError("Gallery: embedding dimensions differ");
      if (!ids.insert(e.entry_id).second) throw ValidationError("Gallery: duplicate entry_id");
      videos_.insert(e.video_id);
    }
  }

  const std::vector<GalleryEntry>& entries() const { return entries_; }
  std::size_t dim() const { return dim_; }
  bool has_video(std::int64_t video_id) const { return videos_.count(video_id) > 0; }

private:
  std::vector<GalleryEntry> entries_;
  std::size_t dim_ = 0;
  std::unordered_set<std::int64_t> videos_;
};

struct JitterParams {
  double sd = 0.25;
  double clip = 0.25;
};

/// Corner-form box jitter: four independent Gaussian offsets, each clipped to
/// [-clip, clip], added to (x0, y0, x1, y1) in that order. The caller owns
/// the rng stream, so repeated jitters of one entry stay decorrelated.
inline Corners jitter_box(const Corners& box, const JitterParams& params, Rng& rng) {
  if (!(params.sd > 0.0) || !(params.clip > 0.0)) throw ValidationError("JitterParams: sd and clip must be > 0");
  auto offset = [&]() { return std::clamp(rng.normal(0.0, params.sd), -params.clip, params.clip); };
  const double r0 = offset(), r1 = offset(), r2 = offset(), r3 = offset();
  return {box.x0 + r0, box.y0 + r1, box.x1 + r2, box.y1 + r3};
}

namespace detail {

inline double squared_distance(const std::vector<float>& a, const std::vector<float>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

struct Ranked {
  double dist_sq;
  std::size_t index;      // into the candidate entry list
  std::int64_t entry_id;  // deterministic tie order
};

inline bool rank_less(const Ranked& a, const Ranked& b) {
  if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
  return a.entry_id < b.entry_id;
}

}  // namespace detail

/// Exact k nearest neighbors by Euclidean distance, excluding one video,
/// ascending distance (ties by entry id). Fewer than k eligible entries just
/// yields them all.
inline std::vector<GalleryEntry> knn_query(const Gallery& gallery, const std::vector<float>& query,
                                           std::size_t k, std::int64_t exclude_video) {
  if (query.size() != gallery.dim()) throw ValidationError("knn_query: query dimension mismatch");
  std::vector<detail::Ranked> ranked;
  const auto& entries = gallery.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].video_id == exclude_video) continue;
    ranked.push_back({detail::squared_distance(entries[i].embedding, query), i, entries[i].entry_id});
  }
  if (ranked.size() > k) {
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                     detail::rank_less);
    ranked.resize(k);
  }
  std::sort(ranked.begin(), ranked.end(), detail::rank_less);
  std::vector<GalleryEntry> out;
  out.reserve(ranked.size());
  for (const detail::Ranked& r : ranked) out.push_back(entries[r.index]);
  return out;
}

/// Cluster-pruning approximate index: roughly sqrt(N) leader entries, each
/// remaining entry assigned to its nearest leader; a query ranks leaders and
/// searches only the closest clusters. probe_fraction controls the
/// recall/speed trade (fraction of clusters visited).
class ClusteredIndex {
public:
  explicit ClusteredIndex(const Gallery& gallery, double probe_fraction = 0.5)
      : gallery_(&gallery), probe_fraction_(probe_fraction) {
    if (!(probe_fraction > 0.0) || probe_fraction > 1.0) {
      throw ValidationError("ClusteredIndex: probe_fraction must be in (0, 1]");
    }
    const auto& entries = gallery.entries();
    const std::size_t n = entries.size();
    std::size_t n_leaders = 1;
    while (n_leaders * n_leaders < n) ++n_leaders;
    const std::size_t stride = (n + n_leaders - 1) / n_leaders;
    for (std::size_t i = 0; i < n; i += stride) leaders_.push_back(i);
    clusters_.resize(leaders_.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = detail::squared_distance(entries[i].embedding, entries[leaders_[0]].embedding);
      for (std::size_t l = 1; l < leaders_.size(); ++l) {
        const double d = detail::squared_distance(entries[i].embedding, entries[leaders_[l]].embedding);
        if (d < best_d) {
          best_d = d;
          best = l;
        }
      }
      clusters_[best].push_back(i);
    }
  }

  std::vector<GalleryEntry> query(const std::vector<float>& q, std::size_t k, std::int64_t exclude_video) const {
    const auto& entries = gallery_->entries();
    if (q.size() != gallery_->dim()) throw ValidationError("ClusteredIndex: query dimension mismatch");
    std::vector<std::pair<double, std::size_t>> leader_rank;
    leader_rank.reserve(leaders_.size());
    for (std::size_t l = 0; l < leaders_.size(); ++l) {
      leader_rank.emplace_back(detail::squared_distance(entries[leaders_[l]].embedding, q), l);
    }
    std::sort(leader_rank.begin(), leader_rank.end());
    const auto n_probe = static_cast<std::size_t>(
        std::max(1.0, probe_fraction_ * static_cast<double>(leaders_.size())));

    std::vector<detail::Ranked> ranked;
    for (std::size_t p = 0; p < std::min(n_probe, leader_rank.size()); ++p) {
      for (std::size_t i : clusters_[leader_rank[p].second]) {
        if (entries[i].video_id == exclude_video) continue;
        ranked.push_back({detail::squared_distance(entries[i].embedding, q), i, entries[i].entry_id});
      }
    }
    if (ranked.size() > k) {
      std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                       detail::rank_less);
      ranked.resize(k);
    }
    std::sort(ranked.begin(), ranked.end(), detail::rank_less);
    std::vector<GalleryEntry> out;
    out.reserve(ranked.size());
    for (const detail::Ranked& r : ranked) out.push_back(entries[r.index]);
    return out;
  }

private:
  const Gallery* gallery_;
  double probe_fraction_;
  std::vector<std::size_t> leaders_;                // indices into gallery entries
  std::vector<std::vector<std::size_t>> clusters_;  // per leader, member indices
};

/// Video-diverse negative sampling: up to n_videos distinct videos drawn
/// uniformly without replacement from the neighbor list, then one uniform box
/// per chosen video. Output follows the selection order.
inline std::vector<GalleryEntry> sample_negatives(const std::vector<GalleryEntry>& neighbors,
                                                  std::size_t n_videos, std::uint64_t seed) {
  std::vector<std::int64_t> videos;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> by_video;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    auto& members = by_video[neighbors[i].video_id];
    if (members.empty()) videos.push_back(neighbors[i].video_id);
    members.push_back(i);
  }
  std::sort(videos.begin(), videos.end());

  Rng video_rng(seed, {rng_stream::kMineVideos});
  const std::size_t m = std::min(n_videos, videos.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(video_rng.below(videos.size() - i));
    std::swap(videos[i], videos[j]);
  }

  std::vector<GalleryEntry> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& members = by_video[videos[i]];
    Rng box_rng(seed, {rng_stream::kMineBoxes, static_cast<std::uint64_t>(videos[i])});
    out.push_back(neighbors[members[static_cast<std::size_t>(box_rng.below(members.size()))]]);
  }
  return out;
}

/// Up to n entries of one video on distinct frames, frames drawn uniformly
/// without replacement.
inline std::vector<GalleryEntry> sample_positives(const Gallery& gallery, std::int64_t video_id,
                                                  std::size_t n, std::uint64_t seed) {
  if (!gallery.has_video(video_id)) throw ValidationError("sample_positives: video not in gallery");
  std::vector<std::int64_t> frames;
  std::unordered_map<std::int64_t, std::size_t> frame_entry;  // frame -> entry index (lowest entry_id)
  const auto& entries = gallery.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].video_id != video_id) continue;
    auto [it, inserted] = frame_entry.try_emplace(entries[i].frame, i);
    if (inserted) {
      frames.push_back(entries[i].frame);
    } else if (entries[i].entry_id < entries[it->second].entry_id) {
      it->second = i;
    }
  }
  std::sort(frames.begin(), frames.end());

  Rng frame_rng(seed, {rng_stream::kMineFrames, static_cast<std::uint64_t>(video_id)});
  const std::size_t m = std::min(n, frames.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(frame_rng.below(frames.size() - i));
    std::swap(frames[i], frames[j]);
  }

  std::vector<GalleryEntry> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(entries[frame_entry[frames[i]]]);
  return out;
}

}  // namespace tdpa
