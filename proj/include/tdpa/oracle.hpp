#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"
#include "tdpa/random.hpp"
#include "tdpa/records.hpp"

namespace tdpa {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Dense row-major score matrix; rows index current detections, columns the
/// reference detections.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  ScoreMatrix() = default;
  ScoreMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

enum class OracleKind { kCosineEmbedding, kSyntheticIdentity };

/// Ground-truth-identity scoring for simulated streams: a base score per
/// (object, object) pair plus deterministic Gaussian noise. Pairs not listed
/// in `confusability` fall back to `same_id_mean` (same object) or
/// `default_cross` (different objects).
struct SyntheticIdentityParams {
  double same_id_mean = 0.9;
  double noise_sd = 0.0;
  double default_cross = 0.0;
  std::map<std::pair<std::int64_t, std::int64_t>, double> confusability;  // keys stored as (min, max)
};

/// Stand-in for a learned re-detection head: scores candidate detections
/// against a reference detection. Read-only after construction.
class SimilarityOracle {
public:
  static SimilarityOracle cosine() { return SimilarityOracle(OracleKind::kCosineEmbedding, {}); }

  static SimilarityOracle synthetic_identity(SyntheticIdentityParams params) {
    if (!(params.noise_sd >= 0.0) || !std::isfinite(params.noise_sd)) {
      throw ValidationError("synthetic identity oracle: noise_sd must be finite and >= 0");
    }
    return SimilarityOracle(OracleKind::kSyntheticIdentity, std::move(params));
  }

  OracleKind kind() const { return kind_; }
  const SyntheticIdentityParams& synthetic_params() const { return synth_; }

  /// Score one detection against a reference. Noise, when configured, is
  /// keyed by (seed, det_id, reference det_id) so results do not depend on
  /// evaluation order.
  double score_one(const Detection& det, const Detection& ref, std::uint64_t seed) const {
    switch (kind_) {
      case OracleKind::kCosineEmbedding: {
        if (det.embedding.size() != ref.embedding.size()) {
          throw ValidationError("cosine oracle: embedding dimension mismatch");
        }
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t k = 0; k < det.embedding.size(); ++k) {
          const double a = det.embedding[k];
          const double b = ref.embedding[k];
          dot += a * b;
          na += a * a;
          nb += b * b;
        }
        if (na == 0.0 || nb == 0.0) return 0.0;  // zero vector: no direction, score 0
        return dot / (std::sqrt(na) * std::sqrt(nb));
      }
      case OracleKind::kSyntheticIdentity: {
        if (!det.object_id || !ref.object_id) {
          throw ValidationError("synthetic identity oracle: detection without object_id");
        }
        double base;
        if (*det.object_id == *ref.object_id) {
          base = synth_.same_id_mean;
        } else {
          const auto key = std::minmax(*det.object_id, *ref.object_id);
          const auto it = synth_.confusability.find({key.first, key.second});
          base = it != synth_.confusability.end() ? it->second : synth_.default_cross;
        }
        if (synth_.noise_sd == 0.0) return base;
        Rng rng(seed, {rng_stream::kOracleNoise, static_cast<std::uint64_t>(det.det_id),
                       static_cast<std::uint64_t>(ref.det_id)});
        return base + rng.normal(0.0, synth_.noise_sd);
      }
    }
    return 0.0;  // unreachable
  }

  std::vector<double> score_against_reference(std::span<const Detection> dets, const Detection& ref,
                                              std::uint64_t seed) const {
    std::vector<double> out;
    out.reserve(dets.size());
    for (const Detection& d : dets) out.push_back(score_one(d, ref, seed));
    return out;
  }

  /// Pairwise scores of current detections (rows) against previous-frame
  /// detections (columns). Pairs farther than `gamma` apart in box space
  /// (L-infinity) are set to -inf and never scored; the threshold itself is
  /// kept (distance <= gamma scores, distance > gamma gates).
  ScoreMatrix pairwise_gated_scores(std::span<const Detection> dets_t, std::span<const Detection> dets_prev,
                                    double gamma, std::uint64_t seed) const {
    if (!(gamma > 0.0)) throw ValidationError("pairwise_gated_scores: gamma must be > 0");
    ScoreMatrix m(dets_t.size(), dets_prev.size(), kNegInf);
    for (std::size_t i = 0; i < dets_t.size(); ++i) {
      for (std::size_t j = 0; j < dets_prev.size(); ++j) {
        if (spatial_distance(dets_t[i].box, dets_prev[j].box) <= gamma) {
          m.at(i, j) = score_one(dets_t[i], dets_prev[j], seed);
        }
      }
    }
    return m;
  }

private:
  SimilarityOracle(OracleKind kind, SyntheticIdentityParams synth) : kind_(kind), synth_(std::move(synth)) {}

  OracleKind kind_;
  SyntheticIdentityParams synth_;
};

}  // namespace tdpa
