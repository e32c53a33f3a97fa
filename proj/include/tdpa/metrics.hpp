#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/records.hpp"

namespace tdpa {

inline double geometric_mean(double tpr, double tnr) { return std::sqrt(tpr * tnr); }

inline double f_score(double pr, double re) { return (pr + re) > 0.0 ? 2.0 * pr * re / (pr + re) : 0.0; }

namespace detail {

inline void require_aligned(const std::vector<PredictionRecord>& preds, const std::vector<TruthRecord>& truth) {
  if (preds.size() != truth.size()) throw ValidationError("metrics: prediction/truth length mismatch");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].t != truth[i].t) throw ValidationError("metrics: prediction/truth frames misaligned");
    if (!std::isfinite(preds[i].confidence)) throw ValidationError("metrics: non-finite confidence");
  }
}

inline void require_all_present(const std::vector<TruthRecord>& truth, const char* metric) {
  for (const TruthRecord& tr : truth) {
    if (!tr.present) {
      throw ValidationError(std::string(metric) + ": ground truth has absent frames; this metric assumes an always-visible target");
    }
  }
}

/// IoU against truth; absent-truth frames count as 0 (there is no box to hit).
inline std::vector<double> frame_ious(const std::vector<PredictionRecord>& preds,
                                      const std::vector<TruthRecord>& truth) {
  std::vector<double> ious(preds.size(), 0.0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i].present) ious[i] = iou(preds[i].box, truth[i].box);
  }
  return ious;
}

/// Distinct confidences of present predictions, ascending, plus a +inf
/// sentinel standing for "report nothing".
inline std::vector<double> confidence_thresholds(const std::vector<PredictionRecord>& preds) {
  std::vector<double> taus;
  for (const PredictionRecord& p : preds) {
    if (p.present) taus.push_back(p.confidence);
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  taus.push_back(std::numeric_limits<double>::infinity());
  return taus;
}

}  // namespace detail

struct SuccessPoint {
  double tau = 0.0;
  double rate = 0.0;
};

/// Fraction of frames whose IoU strictly exceeds tau, over the 101-point
/// threshold grid 0.00, 0.01, ..., 1.00.
inline std::vector<SuccessPoint> success_curve(const std::vector<PredictionRecord>& preds,
                                               const std::vector<TruthRecord>& truth) {
  detail::require_aligned(preds, truth);
  detail::require_all_present(truth, "success_curve");
  if (preds.empty()) throw ValidationError("success_curve: empty input");
  const std::vector<double> ious = detail::frame_ious(preds, truth);
  std::vector<SuccessPoint> curve;
  curve.reserve(101);
  for (int k = 0; k <= 100; ++k) {
    const double tau = k / 100.0;
    std::size_t hits = 0;
    for (double v : ious) {
      if (v > tau) ++hits;
    }
    curve.push_back({tau, static_cast<double>(hits) / static_cast<double>(ious.size())});
  }
  return curve;
}

/// Area under the success curve: the mean of the curve over the grid. Equals
/// mean IoU up to grid discretization.
inline double success_auc(const std::vector<PredictionRecord>& preds, const std::vector<TruthRecord>& truth) {
  const std::vector<SuccessPoint> curve = success_curve(preds, truth);
  double acc = 0.0;
  for (const SuccessPoint& p : curve) acc += p.rate;
  return acc / static_cast<double>(curve.size());
}

/// Fraction of frames whose predicted center lies within 20 pixels of the
/// truth center.
inline double precision_at_20px(const std::vector<PredictionRecord>& preds,
                                const std::vector<TruthRecord>& truth, const FrameDims& dims) {
  detail::require_aligned(preds, truth);
  detail::require_all_present(truth, "precision_at_20px");
  if (preds.empty()) throw ValidationError("precision_at_20px: empty input");
  if (dims.width <= 0 || dims.height <= 0) throw ValidationError("precision_at_20px: frame dimensions missing");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (center_distance_px(preds[i].box, truth[i].box, dims.width, dims.height) <= 20.0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

struct FPoint {
  double tau = 0.0;
  double pr = 0.0;
  double re = 0.0;
  double f = 0.0;
};

/// Precision/recall/F over the swept confidence thresholds. At threshold tau
/// the tracker "reports" a frame when it flags presence with confidence >=
/// tau. Pr = mean IoU over reported frames, Re = mean IoU over truth-present
/// frames; unreported present frames contribute 0 to Re, reported
/// absent-truth frames contribute 0 to Pr.
inline std::vector<FPoint> f_curve(const std::vector<PredictionRecord>& preds,
                                   const std::vector<TruthRecord>& truth) {
  detail::require_aligned(preds, truth);
  std::size_t n_present_truth = 0;
  for (const TruthRecord& tr : truth) {
    if (tr.present) ++n_present_truth;
  }
  if (n_present_truth == 0) throw ValidationError("f_curve: ground truth never present");
  const std::vector<double> ious = detail::frame_ious(preds, truth);

  std::vector<FPoint> curve;
  for (double tau : detail::confidence_thresholds(preds)) {
    if (!std::isfinite(tau)) continue;  // the "report nothing" sentinel has Pr undefined
    double pr_sum = 0.0, re_sum = 0.0;
    std::size_t n_reported = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool reported = preds[i].present && preds[i].confidence >= tau;
      if (reported) {
        pr_sum += ious[i];
        ++n_reported;
        if (truth[i].present) re_sum += ious[i];
      }
    }
    const double pr = n_reported > 0 ? pr_sum / static_cast<double>(n_reported) : 0.0;
    const double re = re_sum / static_cast<double>(n_present_truth);
    curve.push_back({tau, pr, re, f_score(pr, re)});
  }
  return curve;
}

struct LongTermF {
  double f_max = 0.0;
  double pr = 0.0;
  double re = 0.0;
  double tau = 0.0;
};

/// Maximum F over the threshold sweep, with the precision/recall attained
/// there. A tracker that never reports presence scores 0.
inline LongTermF longterm_f(const std::vector<PredictionRecord>& preds, const std::vector<TruthRecord>& truth) {
  LongTermF best;
  for (const FPoint& p : f_curve(preds, truth)) {
    if (p.f > best.f_max) best = {p.f, p.pr, p.re, p.tau};
  }
  return best;
}

struct GmPoint {
  double tau = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  double gm = 0.0;
};

/// True-positive rate (present frames reported with IoU > 0.5) and
/// true-negative rate (absent frames left unreported) per threshold,
/// including the "report nothing" sentinel.
inline std::vector<GmPoint> gm_curve(const std::vector<PredictionRecord>& preds,
                                     const std::vector<TruthRecord>& truth) {
  detail::require_aligned(preds, truth);
  std::size_t n_present = 0, n_absent = 0;
  for (const TruthRecord& tr : truth) {
    (tr.present ? n_present : n_absent) += 1;
  }
  if (n_absent == 0) {
    throw ValidationError(
        "gm_curve: ground truth has no absent frames, so the true negative rate is undefined; "
        "use success/precision metrics for always-visible targets");
  }
  const std::vector<double> ious = detail::frame_ious(preds, truth);

  std::vector<GmPoint> curve;
  for (double tau : detail::confidence_thresholds(preds)) {
    std::size_t tp = 0, tn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool reported = preds[i].present && preds[i].confidence >= tau;
      if (truth[i].present) {
        if (reported && ious[i] > 0.5) ++tp;
      } else {
        if (!reported) ++tn;
      }
    }
    const double tpr = n_present > 0 ? static_cast<double>(tp) / static_cast<double>(n_present) : 0.0;
    const double tnr = static_cast<double>(tn) / static_cast<double>(n_absent);
    curve.push_back({tau, tpr, tnr, geometric_mean(tpr, tnr)});
  }
  return curve;
}

struct MaxGm {
  double max_gm = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  double tau = 0.0;
};

inline MaxGm max_gm(const std::vector<PredictionRecord>& preds, const std::vector<TruthRecord>& truth) {
  MaxGm best;
  bool first = true;
  for (const GmPoint& p : gm_curve(preds, truth)) {
    if (first || p.gm > best.max_gm) best = {p.gm, p.tpr, p.tnr, p.tau};
    first = false;
  }
  return best;
}

/// Simulator-only oracle metric: over truth-present frames, how often the
/// tracker's selected detection carries the target's object id. Vacuously 1
/// when the target is never present.
inline double identity_accuracy(const std::vector<PredictionRecord>& preds,
                                const std::vector<TruthRecord>& truth) {
  detail::require_aligned(preds, truth);
  std::size_t n_present = 0, correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!truth[i].present) continue;
    ++n_present;
    if (preds[i].present && preds[i].object_id && truth[i].object_id &&
        *preds[i].object_id == *truth[i].object_id) {
      ++correct;
    }
  }
  if (n_present == 0) return 1.0;
  return static_cast<double>(correct) / static_cast<double>(n_present);
}

struct ResetEval {
  std::int64_t resets = 0;
  double reset_accuracy = 0.0;
  std::int64_t frames_counted = 0;
};

/// Reset-based protocol: run until a zero-IoU frame, count a reset,
/// reinitialize from ground truth five frames later, and exclude a 10-frame
/// burn-in after every (re)initialization from the accuracy average.
///
/// `make_tracker(template_detection)` must return a ready tracker whose
/// step(t, detections) yields a PredictionRecord; reinitialization templates
/// are the stream detections best matching the truth box (skipping frames
/// where nothing overlaps it). Truth-absent frames neither fail nor count.
template <typename MakeTracker>
ResetEval reset_based_eval(MakeTracker&& make_tracker, const std::vector<std::vector<Detection>>& frames,
                           const std::vector<TruthRecord>& truth) {
  if (frames.size() != truth.size()) throw ValidationError("reset_based_eval: stream/truth length mismatch");
  if (frames.empty()) throw ValidationError("reset_based_eval: empty stream");

  constexpr std::int64_t kBurnIn = 10;
  constexpr std::int64_t kReinitDelay = 5;
  const auto n = static_cast<std::int64_t>(frames.size());

  // Best-overlap detection against the truth box, or null when nothing
  // overlaps (no usable reinit template at this frame).
  auto match_truth = [&](std::int64_t t) -> const Detection* {
    if (!truth[static_cast<std::size_t>(t)].present) return nullptr;
    const Detection* best = nullptr;
    double best_iou = 0.0;
    for (const Detection& d : frames[static_cast<std::size_t>(t)]) {
      const double ov = iou(d.box, truth[static_cast<std::size_t>(t)].box);
      if (ov > best_iou) {
        best_iou = ov;
        best = &d;
      }
    }
    return best;
  };

  ResetEval result;
  double iou_sum = 0.0;
  std::int64_t t = 0;

  while (t < n) {
    const Detection* tmpl = match_truth(t);
    if (!tmpl) {
      ++t;  // nothing to initialize from here
      continue;
    }
    auto tracker = make_tracker(*tmpl);
    const std::int64_t init_t = t;
    bool failed = false;
    for (t = init_t + 1; t < n; ++t) {
      const PredictionRecord pred = tracker.step(t, frames[static_cast<std::size_t>(t)]);
      if (!truth[static_cast<std::size_t>(t)].present) continue;
      const double ov = iou(pred.box, truth[static_cast<std::size_t>(t)].box);
      if (ov == 0.0) {
        ++result.resets;
        failed = true;
        break;
      }
      if (t - init_t > kBurnIn) {
        iou_sum += ov;
        ++result.frames_counted;
      }
    }
    if (failed) t += kReinitDelay;
  }

  if (result.frames_counted > 0) result.reset_accuracy = iou_sum / static_cast<double>(result.frames_counted);
  return result;
}

/// Everything the evaluation CLI can report. Metrics whose preconditions the
/// input does not meet stay unset, with an explanatory note.
struct EvalReport {
  std::optional<double> success_auc;
  std::optional<double> precision_at_20px;
  std::optional<double> f_max;
  std::optional<double> pr_at_fmax;
  std::optional<double> re_at_fmax;
  std::optional<double> max_gm;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<std::int64_t> resets;
  std::optional<double> reset_accuracy;
  std::optional<double> identity_accuracy;
  std::vector<std::string> notes;
};

/// Fills in every metric the prediction/truth pair supports: success and
/// precision need an always-visible target, MaxGM needs absence, F always
/// works. Reset-based numbers need a driveable tracker and are filled by the
/// pipeline, not here.
inline EvalReport evaluate(const std::vector<PredictionRecord>& preds, const std::vector<TruthRecord>& truth,
                           const std::optional<FrameDims>& dims) {
  detail::require_aligned(preds, truth);
  EvalReport report;
  bool all_present = true;
  bool any_present = false;
  bool any_absent = false;
  for (const TruthRecord& tr : truth) {
    all_present = all_present && tr.present;
    any_present = any_present || tr.present;
    any_absent = any_absent || !tr.present;
  }

  if (all_present && !preds.empty()) {
    report.success_auc = success_auc(preds, truth);
    if (dims) {
      report.precision_at_20px = precision_at_20px(preds, truth, *dims);
    } else {
      report.notes.push_back("precision_at_20px skipped: frame dimensions unknown");
    }
  } else {
    report.notes.push_back("success/precision skipped: ground truth has absent frames");
  }

  if (any_present) {
    const LongTermF f = longterm_f(preds, truth);
    report.f_max = f.f_max;
    report.pr_at_fmax = f.pr;
    report.re_at_fmax = f.re;
  } else {
    report.notes.push_back("F-score skipped: ground truth never present");
  }

  if (any_absent) {
    const MaxGm gm = max_gm(preds, truth);
    report.max_gm = gm.max_gm;
    report.tpr = gm.tpr;
    report.tnr = gm.tnr;
  } else {
    report.notes.push_back("MaxGM skipped: ground truth has no absent frames");
  }

  bool have_ids = false;
  for (const TruthRecord& tr : truth) {
    if (tr.object_id) have_ids = true;
  }
  if (have_ids) {
    report.identity_accuracy = identity_accuracy(preds, truth);
  }
  return report;
}

}  // namespace tdpa
