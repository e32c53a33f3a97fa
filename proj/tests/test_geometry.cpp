#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tdpa/geometry.hpp"
#include "tdpa/random.hpp"

using namespace tdpa;

namespace {

// Independent IoU: clip both boxes to corners with nested min/max instead of
// the production single-pass overlap arithmetic.
double iou_reference(const BBox& a, const BBox& b) {
  const Corners ca = to_corners(a);
  const Corners cb = to_corners(b);
  const double ix0 = std::max(ca.x0, cb.x0);
  const double iy0 = std::max(ca.y0, cb.y0);
  const double ix1 = std::min(ca.x1, cb.x1);
  const double iy1 = std::min(ca.y1, cb.y1);
  const double iw = std::max(0.0, ix1 - ix0);
  const double ih = std::max(0.0, iy1 - iy0);
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

BBox random_box(Rng& rng) {
  const double w = rng.uniform(0.01, 0.5);
  const double h = rng.uniform(0.01, 0.5);
  return BBox(rng.uniform(w / 2, 1 - w / 2), rng.uniform(h / 2, 1 - h / 2), w, h);
}

}  // namespace

TEST_CASE("BBox constructor clamps into the unit square") {
  const BBox b(1.4, -0.2, 2.0, 0.5);
  CHECK(b.x == 1.0);
  CHECK(b.y == 0.0);
  CHECK(b.w == 1.0);
  CHECK(b.h == 0.5);
  CHECK_THROWS_AS(BBox(std::nan(""), 0.5, 0.1, 0.1), ValidationError);
  CHECK_THROWS_AS(BBox(0.5, 0.5, std::numeric_limits<double>::infinity(), 0.1), ValidationError);
}

TEST_CASE("clamping is counted but in-range boxes are untouched") {
  const std::uint64_t before = clamp_warning_count();
  const BBox inside(0.5, 0.5, 0.2, 0.2);
  CHECK(clamp_warning_count() == before);
  (void)BBox(0.5, 0.5, 3.0, 0.2);
  CHECK(clamp_warning_count() == before + 1);
  CHECK(inside == BBox(0.5, 0.5, 0.2, 0.2));
}

TEST_CASE("corner and pixel round trips preserve coordinates") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const BBox b = random_box(rng);
    const Corners c = to_corners(b);
    CHECK(c.x0 == Catch::Approx(b.x - b.w / 2));
    CHECK(c.y1 == Catch::Approx(b.y + b.h / 2));
    const PixelBox px = to_pixel(b, 1280, 720);
    const BBox back = to_normalized(px);
    CHECK(back.x == Catch::Approx(b.x).margin(1e-12));
    CHECK(back.y == Catch::Approx(b.y).margin(1e-12));
    CHECK(back.w == Catch::Approx(b.w).margin(1e-12));
    CHECK(back.h == Catch::Approx(b.h).margin(1e-12));
  }
}

TEST_CASE("IoU matches a clip-rectangle reference on random pairs") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const BBox a = random_box(rng);
    const BBox b = random_box(rng);
    CHECK(iou(a, b) == Catch::Approx(iou_reference(a, b)).margin(1e-12));
  }
}

TEST_CASE("IoU basics: identity, disjoint, known overlap") {
  const BBox a(0.3, 0.3, 0.2, 0.2);
  CHECK(iou(a, a) == Catch::Approx(1.0));
  CHECK(iou(a, BBox(0.8, 0.8, 0.2, 0.2)) == 0.0);
  // Shift by half a width: intersection w/2 * h, union 1.5 * w * h.
  const BBox shifted(0.4, 0.3, 0.2, 0.2);
  CHECK(iou(a, shifted) == Catch::Approx(1.0 / 3.0));
  // Degenerate boxes never divide by zero.
  CHECK(iou(BBox(0.5, 0.5, 0.0, 0.0), BBox(0.5, 0.5, 0.0, 0.0)) == 0.0);
}

TEST_CASE("spatial distance is the largest coordinate gap") {
  const BBox a(0.30, 0.40, 0.10, 0.20);
  const BBox b(0.35, 0.38, 0.16, 0.21);
  CHECK(spatial_distance(a, b) == Catch::Approx(0.06));
  CHECK(spatial_distance(a, a) == 0.0);
}

TEST_CASE("box location score is the negated coordinate L1 gap") {
  const BBox a(0.30, 0.40, 0.10, 0.20);
  const BBox b(0.35, 0.38, 0.16, 0.21);
  CHECK(loc_score_boxes(a, b) == Catch::Approx(-(0.05 + 0.02 + 0.06 + 0.01)));
  CHECK(loc_score_boxes(a, a) == 0.0);
  CHECK(loc_score_boxes(a, b) == loc_score_boxes(b, a));
}

TEST_CASE("center distance reports pixels") {
  const BBox a(0.2, 0.4, 0.1, 0.1);
  const BBox b(0.5, 0.4, 0.1, 0.1);
  CHECK(center_distance_px(a, b, 1000, 500) == Catch::Approx(300.0));
  const BBox c(0.2, 0.8, 0.1, 0.1);
  CHECK(center_distance_px(a, c, 1000, 500) == Catch::Approx(200.0));
}
