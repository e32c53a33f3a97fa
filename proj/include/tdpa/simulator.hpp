#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/random.hpp"
#include "tdpa/records.hpp"

namespace tdpa {

/// Detector imperfections applied on top of the scripted scene.
struct DetectorNoise {
  double miss_rate = 0.0;      // chance a visible object yields no detection
  double clutter_rate = 0.0;   // Poisson mean of spurious detections per frame
  double box_jitter_sd = 0.0;  // Gaussian sd added to each box coordinate
};

struct Waypoint {
  std::int64_t t = 0;
  BBox box;
};

/// One scripted object: a piecewise-linear box trajectory, visibility
/// intervals, and an appearance prototype that detections sample around.
struct ObjectSpec {
  std::int64_t id = 0;
  bool is_target = false;
  std::vector<Waypoint> trajectory;
  std::vector<std::pair<std::int64_t, std::int64_t>> visibility;  // [start, end)
  std::vector<float> embedding_prototype;
  double embedding_noise_sd = 0.0;
};

struct ScenarioSpec {
  std::int64_t n_frames = 1;
  int frame_w = 1280;
  int frame_h = 720;
  std::vector<ObjectSpec> objects;
  DetectorNoise detector;
  std::uint64_t seed = 0;
};

struct MissEvent {
  std::int64_t t = 0;
  std::int64_t object_id = 0;
};

struct SimulationResult {
  std::vector<std::vector<Detection>> frames;  // index = frame
  std::vector<TruthRecord> truth;              // target box per frame
  std::vector<MissEvent> misses;               // dropped detections of scripted objects
  FrameDims dims;
  std::int64_t target_id = 0;
  /// Clean target detection at frame 0 (exact prototype, un-jittered box);
  /// detections' ff_scores are computed against it.
  Detection template_detection;
};

inline void validate(const ScenarioSpec& spec) {
  if (spec.n_frames < 1) throw ValidationError("ScenarioSpec: n_frames must be >= 1");
  if (spec.frame_w <= 0 || spec.frame_h <= 0) throw ValidationError("ScenarioSpec: frame dimensions must be positive");
  if (spec.detector.miss_rate < 0.0 || spec.detector.miss_rate > 1.0) {
    throw ValidationError("ScenarioSpec: miss_rate outside [0,1]");
  }
  if (spec.detector.clutter_rate < 0.0) throw ValidationError("ScenarioSpec: clutter_rate must be >= 0");
  if (spec.detector.box_jitter_sd < 0.0) throw ValidationError("ScenarioSpec: box_jitter_sd must be >= 0");

  std::size_t targets = 0;
  std::size_t dim = 0;
  std::vector<std::int64_t> ids;
  for (const ObjectSpec& obj : spec.objects) {
    if (obj.is_target) ++targets;
    ids.push_back(obj.id);
    if (obj.id < 0) throw ValidationError("ScenarioSpec: scripted object ids must be >= 0 (negatives mark clutter)");
    if (obj.trajectory.empty()) throw ValidationError("ScenarioSpec: object trajectory must have a waypoint");
    for (std::size_t i = 1; i < obj.trajectory.size(); ++i) {
      if (obj.trajectory[i].t <= obj.trajectory[i - 1].t) {
        throw ValidationError("ScenarioSpec: trajectory waypoints must increase in t");
      }
    }
    if (obj.embedding_prototype.empty()) throw ValidationError("ScenarioSpec: embedding_prototype must be non-empty");
    if (dim == 0) dim = obj.embedding_prototype.size();
    if (obj.embedding_prototype.size() != dim) {
      throw ValidationError("ScenarioSpec: embedding_prototype dimensions differ across objects");
    }
    if (obj.embedding_noise_sd < 0.0) throw ValidationError("ScenarioSpec: embedding_noise_sd must be >= 0");
    std::int64_t prev_end = -1;
    for (const auto& [start, end] : obj.visibility) {
      if (start < 0 || end > spec.n_frames || start >= end) {
        throw ValidationError("ScenarioSpec: visibility interval outside [0, n_frames) or empty");
      }
      if (start < prev_end) throw ValidationError("ScenarioSpec: visibility intervals overlap or are unsorted");
      prev_end = end;
    }
  }
  if (targets != 1) throw ValidationError("ScenarioSpec: exactly one object must have is_target = true");
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("ScenarioSpec: object ids must be unique");
  }
}

/// Piecewise-linear interpolation over the waypoints, clamped to the first
/// and last boxes outside their time range.
inline BBox trajectory_box(const std::vector<Waypoint>& traj, std::int64_t t) {
  if (t <= traj.front().t) return traj.front().box;
  if (t >= traj.back().t) return traj.back().box;
  std::size_t i = 1;
  while (traj[i].t < t) ++i;
  const Waypoint& a = traj[i - 1];
  const Waypoint& b = traj[i];
  const double u = static_cast<double>(t - a.t) / static_cast<double>(b.t - a.t);
  auto lerp = [u](double p, double q) { return p + (q - p) * u; };
  return {lerp(a.box.x, b.box.x), lerp(a.box.y, b.box.y), lerp(a.box.w, b.box.w), lerp(a.box.h, b.box.h)};
}

inline bool visible_at(const ObjectSpec& obj, std::int64_t t) {
  for (const auto& [start, end] : obj.visibility) {
    if (t >= start && t < end) return true;
  }
  return false;
}

/// Renders the scenario into per-frame detections plus the target's ground
/// truth. All randomness is drawn from streams keyed by (seed, purpose,
/// frame, entity), so output is bit-reproducible and independent of
/// evaluation order. The oracle supplies each detection's ff_score against
/// the clean frame-0 target template.
inline SimulationResult generate(const ScenarioSpec& spec, const SimilarityOracle& oracle) {
  validate(spec);
  const ObjectSpec* target = nullptr;
  for (const ObjectSpec& obj : spec.objects) {
    if (obj.is_target) target = &obj;
  }

  SimulationResult result;
  result.dims = {spec.frame_w, spec.frame_h};
  result.target_id = target->id;
  result.template_detection.t = 0;
  result.template_detection.box = trajectory_box(target->trajectory, 0);
  result.template_detection.embedding = target->embedding_prototype;
  result.template_detection.object_id = target->id;
  result.template_detection.det_id = -1;  // reserved: not part of the stream
  result.template_detection.ff_score = 1.0;
  result.template_detection.ff_tracklet_score = 1.0;

  std::int64_t next_det_id = 0;
  std::int64_t next_clutter_id = -1;
  result.frames.resize(static_cast<std::size_t>(spec.n_frames));
  result.truth.reserve(static_cast<std::size_t>(spec.n_frames));

  for (std::int64_t t = 0; t < spec.n_frames; ++t) {
    auto& frame = result.frames[static_cast<std::size_t>(t)];

    for (const ObjectSpec& obj : spec.objects) {
      if (!visible_at(obj, t)) continue;
      if (spec.detector.miss_rate > 0.0) {
        Rng miss_rng(spec.seed, {rng_stream::kDetectorMiss, static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(obj.id)});
        if (miss_rng.bernoulli(spec.detector.miss_rate)) {
          result.misses.push_back({t, obj.id});
          continue;
        }
      }

      Detection d;
      d.t = t;
      BBox box = trajectory_box(obj.trajectory, t);
      if (spec.detector.box_jitter_sd > 0.0) {
        Rng jitter(spec.seed, {rng_stream::kBoxJitter, static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(obj.id)});
        const double sd = spec.detector.box_jitter_sd;
        box = BBox(box.x + jitter.normal(0.0, sd), box.y + jitter.normal(0.0, sd),
                   box.w + jitter.normal(0.0, sd), box.h + jitter.normal(0.0, sd));
      }
      d.box = box;
      d.embedding = obj.embedding_prototype;
      if (obj.embedding_noise_sd > 0.0) {
        Rng noise(spec.seed, {rng_stream::kEmbeddingNoise, static_cast<std::uint64_t>(t),
                              static_cast<std::uint64_t>(obj.id)});
        for (float& v : d.embedding) {
          v += static_cast<float>(noise.normal(0.0, obj.embedding_noise_sd));
        }
      }
      d.object_id = obj.id;
      d.det_id = next_det_id++;
      frame.push_back(std::move(d));
    }

    if (spec.detector.clutter_rate > 0.0) {
      Rng count_rng(spec.seed, {rng_stream::kClutter, static_cast<std::uint64_t>(t)});
      const int n_clutter = count_rng.poisson(spec.detector.clutter_rate);
      const std::size_t dim = spec.objects.front().embedding_prototype.size();
      for (int i = 0; i < n_clutter; ++i) {
        Rng rng(spec.seed, {rng_stream::kClutter, static_cast<std::uint64_t>(t),
                            static_cast<std::uint64_t>(i), 1});
        Detection d;
        d.t = t;
        d.box = BBox(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.02, 0.2),
                     rng.uniform(0.02, 0.2));
        d.embedding.resize(dim);
        double norm_sq = 0.0;
        for (float& v : d.embedding) {
          v = static_cast<float>(rng.normal(0.0, 1.0));
          norm_sq += static_cast<double>(v) * static_cast<double>(v);
        }
        const double norm = std::sqrt(norm_sq);
        if (norm > 0.0) {
          for (float& v : d.embedding) v = static_cast<float>(v / norm);
        }
        d.object_id = next_clutter_id--;
        d.det_id = next_det_id++;
        frame.push_back(std::move(d));
      }
    }

    TruthRecord truth;
    truth.t = t;
    truth.present = visible_at(*target, t);
    truth.box = trajectory_box(target->trajectory, t);
    truth.object_id = target->id;
    result.truth.push_back(truth);
  }

  for (auto& frame : result.frames) {
    for (Detection& d : frame) {
      d.ff_score = oracle.score_one(d, result.template_detection, spec.seed);
    }
  }
  return result;
}

}  // namespace tdpa
