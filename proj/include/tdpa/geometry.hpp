#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>

#include "tdpa/errors.hpp"

namespace tdpa {

/// Counts constructor inputs that had to be clamped back into range.
inline std::atomic<std::uint64_t>& clamp_warning_count() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

/// Axis-aligned box in normalized center form: x and w are fractions of the
/// image width, y and h fractions of the image height, all in [0, 1].
/// Out-of-range inputs are clamped (box regression near frame edges routinely
/// overshoots); non-finite inputs are rejected.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  BBox() = default;

  BBox(double x_, double y_, double w_, double h_) {
    if (!std::isfinite(x_) || !std::isfinite(y_) || !std::isfinite(w_) || !std::isfinite(h_)) {
      throw ValidationError("BBox: non-finite coordinate");
    }
    bool clamped = false;
    auto clamp01 = [&clamped](double v) {
      if (v < 0.0 || v > 1.0) clamped = true;
      return std::clamp(v, 0.0, 1.0);
    };
    x = clamp01(x_);
    y = clamp01(y_);
    w = clamp01(w_);
    h = clamp01(h_);
    if (clamped) clamp_warning_count().fetch_add(1, std::memory_order_relaxed);
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Corner form (x0, y0) .. (x1, y1) in the same normalized units as BBox.
struct Corners {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

inline Corners to_corners(const BBox& b) {
  return {b.x - b.w / 2.0, b.y - b.h / 2.0, b.x + b.w / 2.0, b.y + b.h / 2.0};
}

/// Corner box in pixel units with the frame it belongs to.
struct PixelBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  int frame_w = 0;
  int frame_h = 0;
};

inline PixelBox to_pixel(const BBox& b, int frame_w, int frame_h) {
  if (frame_w <= 0 || frame_h <= 0) throw ValidationError("to_pixel: frame dimensions must be positive");
  const Corners c = to_corners(b);
  return {c.x0 * frame_w, c.y0 * frame_h, c.x1 * frame_w, c.y1 * frame_h, frame_w, frame_h};
}

inline BBox to_normalized(const PixelBox& p) {
  if (p.frame_w <= 0 || p.frame_h <= 0) throw ValidationError("to_normalized: frame dimensions must be positive");
  const double w = (p.x1 - p.x0) / p.frame_w;
  const double h = (p.y1 - p.y0) / p.frame_h;
  const double x = (p.x0 + p.x1) / 2.0 / p.frame_w;
  const double y = (p.y0 + p.y1) / 2.0 / p.frame_h;
  return {x, y, w, h};
}

/// L-infinity distance over (x, y, w, h).
inline double spatial_distance(const BBox& a, const BBox& b) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  const double dw = std::abs(a.w - b.w);
  const double dh = std::abs(a.h - b.h);
  return std::max(std::max(dx, dy), std::max(dw, dh));
}

/// Negative L1 distance over (x, y, w, h); 0 for equal boxes, else < 0.
/// Components are added in x, y, w, h order (tests compare scores bitwise).
inline double loc_score_boxes(const BBox& a, const BBox& b) {
  return -(std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.w - b.w) + std::abs(a.h - b.h));
}

/// Intersection over union. Degenerate (zero-area) boxes give 0, identical or
/// not.
inline double iou(const BBox& a, const BBox& b) {
  const Corners ca = to_corners(a);
  const Corners cb = to_corners(b);
  const double iw = std::max(0.0, std::min(ca.x1, cb.x1) - std::max(ca.x0, cb.x0));
  const double ih = std::max(0.0, std::min(ca.y1, cb.y1) - std::max(ca.y0, cb.y0));
  const double inter = iw * ih;
  const double area_a = a.w * a.h;
  const double area_b = b.w * b.h;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

/// Euclidean center distance in pixels.
inline double center_distance_px(const BBox& a, const BBox& b, int frame_w, int frame_h) {
  const double dx = (a.x - b.x) * frame_w;
  const double dy = (a.y - b.y) * frame_h;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace tdpa
