#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tdpa/geometry.hpp"

namespace tdpa {

/// One candidate box at one timestep. `ff_score` is the re-detection
/// confidence against the first-frame template; `ff_tracklet_score` is the
/// confidence against the most recent detection of the first-frame tracklet,
/// filled in by the engine when the detection enters a frame and immutable
/// afterwards. `object_id` is ground truth and only present on simulator
/// streams.
struct Detection {
  std::int64_t t = 0;
  BBox box;
  double ff_score = 0.0;
  double ff_tracklet_score = 0.0;
  std::vector<float> embedding;
  std::optional<std::int64_t> object_id;
  std::int64_t det_id = 0;
};

/// Per-frame ground truth: the target's clean box, or absent.
struct TruthRecord {
  std::int64_t t = 0;
  bool present = false;
  BBox box;
  std::optional<std::int64_t> object_id;
};

/// Per-frame tracker output.
struct PredictionRecord {
  std::int64_t t = 0;
  BBox box;
  double confidence = 0.0;
  bool present = false;
  std::optional<std::int64_t> object_id;
};

struct FrameDims {
  int width = 0;
  int height = 0;
};

}  // namespace tdpa
