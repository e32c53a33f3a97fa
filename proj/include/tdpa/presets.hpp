#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/simulator.hpp"

namespace tdpa {

namespace detail {

/// Unit prototype in the plane of the first two embedding axes, `deg` degrees
/// away from axis 0. Cosine similarity between two such prototypes is the
/// cosine of the angle between them, which makes preset separations explicit.
inline std::vector<float> planar_prototype(std::size_t dim, double deg) {
  std::vector<float> proto(dim, 0.0f);
  const double rad = deg * 3.14159265358979323846 / 180.0;
  proto[0] = static_cast<float>(std::cos(rad));
  proto[1] = static_cast<float>(std::sin(rad));
  return proto;
}

}  // namespace detail

/// Fixed synthetic scenarios exercising the failure modes long-term trackers
/// care about: identity swaps at object crossings, full occlusions of
/// realistic length, leaving the frame, and background clutter.
inline ScenarioSpec preset(const std::string& name) {
  constexpr std::size_t kDim = 8;
  ScenarioSpec spec;
  spec.n_frames = 160;
  spec.seed = 0;

  if (name == "crossing_distractor") {
    // Target and a confusable distractor swap sides, overlapping mid-way.
    // Embedding noise is sized so per-frame template scores flip order now
    // and then while accumulated tracklet evidence stays unambiguous.
    spec.n_frames = 120;
    spec.detector = {0.0, 0.0, 0.004};
    ObjectSpec target;
    target.id = 1;
    target.is_target = true;
    target.trajectory = {{0, {0.20, 0.50, 0.08, 0.12}}, {119, {0.80, 0.50, 0.08, 0.12}}};
    target.visibility = {{0, 120}};
    target.embedding_prototype = detail::planar_prototype(kDim, 0.0);
    target.embedding_noise_sd = 0.18;
    ObjectSpec distractor;
    distractor.id = 2;
    distractor.trajectory = {{0, {0.80, 0.50, 0.08, 0.12}}, {119, {0.20, 0.50, 0.08, 0.12}}};
    distractor.visibility = {{0, 120}};
    distractor.embedding_prototype = detail::planar_prototype(kDim, 28.0);
    distractor.embedding_noise_sd = 0.18;
    spec.objects = {target, distractor};
    return spec;
  }

  if (name == "occlusion_40") {
    // The target vanishes for 41 consecutive frames (long-term benchmarks
    // report disappearances of about this length) and returns near where it
    // left; a dissimilar distractor stays visible throughout.
    spec.detector = {0.0, 0.0, 0.003};
    ObjectSpec target;
    target.id = 1;
    target.is_target = true;
    target.trajectory = {{0, {0.30, 0.40, 0.10, 0.15}},
                         {59, {0.45, 0.50, 0.10, 0.15}},
                         {101, {0.50, 0.52, 0.10, 0.15}},
                         {159, {0.65, 0.60, 0.10, 0.15}}};
    target.visibility = {{0, 60}, {101, 160}};
    target.embedding_prototype = detail::planar_prototype(kDim, 0.0);
    ObjectSpec distractor;
    distractor.id = 2;
    distractor.trajectory = {{0, {0.75, 0.30, 0.09, 0.13}}, {159, {0.60, 0.70, 0.09, 0.13}}};
    distractor.visibility = {{0, 160}};
    distractor.embedding_prototype = detail::planar_prototype(kDim, 100.0);
    spec.objects = {target, distractor};
    return spec;
  }

  if (name == "out_of_view") {
    // The target drifts off the right edge and re-enters later, with light
    // detector noise and occasional clutter.
    spec.n_frames = 140;
    spec.detector = {0.02, 0.5, 0.005};
    ObjectSpec target;
    target.id = 1;
    target.is_target = true;
    target.trajectory = {{0, {0.50, 0.50, 0.10, 0.12}},
                         {69, {0.93, 0.50, 0.10, 0.12}},
                         {110, {0.90, 0.45, 0.10, 0.12}},
                         {139, {0.60, 0.45, 0.10, 0.12}}};
    target.visibility = {{0, 70}, {110, 140}};
    target.embedding_prototype = detail::planar_prototype(kDim, 0.0);
    target.embedding_noise_sd = 0.05;
    spec.objects = {target};
    return spec;
  }

  if (name == "clutter") {
    // Always-visible target wading through spurious detections with fresh
    // random appearances, plus misses and box noise.
    spec.n_frames = 200;
    spec.detector = {0.05, 3.0, 0.01};
    ObjectSpec target;
    target.id = 1;
    target.is_target = true;
    target.trajectory = {{0, {0.30, 0.30, 0.09, 0.12}},
                         {66, {0.70, 0.35, 0.09, 0.12}},
                         {133, {0.65, 0.70, 0.09, 0.12}},
                         {199, {0.30, 0.65, 0.09, 0.12}}};
    target.visibility = {{0, 200}};
    target.embedding_prototype = detail::planar_prototype(kDim, 0.0);
    target.embedding_noise_sd = 0.05;
    spec.objects = {target};
    return spec;
  }

  throw ValidationError("preset: unknown scenario name '" + name + "'");
}

}  // namespace tdpa
