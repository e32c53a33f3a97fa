#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tdpa/engine.hpp"
#include "tdpa/errors.hpp"
#include "tdpa/json_util.hpp"
#include "tdpa/oracle.hpp"
#include "tdpa/simulator.hpp"

namespace tdpa {

inline std::string to_string(TrackerMode mode) {
  switch (mode) {
    case TrackerMode::kTdpa: return "tdpa";
    case TrackerMode::kArgmax: return "argmax";
    case TrackerMode::kShortTerm: return "short_term";
  }
  throw ValidationError("to_string: unknown tracker mode");
}

inline TrackerMode mode_from_string(const std::string& s) {
  if (s == "tdpa") return TrackerMode::kTdpa;
  if (s == "argmax") return TrackerMode::kArgmax;
  if (s == "short_term") return TrackerMode::kShortTerm;
  throw ValidationError("mode: expected one of tdpa, argmax, short_term; got '" + s + "'");
}

/// Full tracker configuration as carried by the CLI's --config JSON. Every
/// section is optional and falls back to the tuned defaults; unknown keys are
/// rejected so typos cannot silently revert a parameter to its default.
struct EngineConfig {
  EngineParams engine;
  SimilarityOracle oracle = SimilarityOracle::cosine();
};

inline EngineConfig config_from_json(const jsonu::Json& j) {
  const std::string ctx = "config";
  jsonu::require_keys(j, ctx, {}, {"mode", "seed", "builder", "dp", "short_term", "oracle"});
  EngineConfig cfg;

  if (j.contains("mode")) cfg.engine.mode = mode_from_string(jsonu::get_string(j, "mode", ctx));
  if (j.contains("seed")) cfg.engine.seed = static_cast<std::uint64_t>(jsonu::get_int(j, "seed", ctx));

  if (j.contains("builder")) {
    const jsonu::Json& b = j.at("builder");
    jsonu::require_keys(b, ctx + ".builder", {}, {"alpha", "beta", "gamma"});
    if (b.contains("alpha")) cfg.engine.builder.alpha = jsonu::get_finite(b, "alpha", ctx);
    if (b.contains("beta")) cfg.engine.builder.beta = jsonu::get_finite(b, "beta", ctx);
    if (b.contains("gamma")) cfg.engine.builder.gamma = jsonu::get_finite(b, "gamma", ctx);
    if (cfg.engine.builder.gamma <= 0.0) throw ValidationError(ctx + ": builder.gamma must be > 0");
  }

  if (j.contains("dp")) {
    const jsonu::Json& d = j.at("dp");
    jsonu::require_keys(d, ctx + ".dp", {}, {"w_ff", "w_loc", "max_gap"});
    if (d.contains("w_ff")) cfg.engine.dp.w_ff = jsonu::get_finite(d, "w_ff", ctx);
    if (d.contains("w_loc")) cfg.engine.dp.w_loc = jsonu::get_finite(d, "w_loc", ctx);
    if (d.contains("max_gap")) cfg.engine.dp.max_gap = jsonu::get_int(d, "max_gap", ctx);
    if (cfg.engine.dp.w_ff < 0.0 || cfg.engine.dp.w_ff > 1.0) {
      throw ValidationError(ctx + ": dp.w_ff must be in [0, 1]");
    }
    if (cfg.engine.dp.max_gap < 1) throw ValidationError(ctx + ": dp.max_gap must be >= 1");
  }

  if (j.contains("short_term")) {
    const jsonu::Json& s = j.at("short_term");
    jsonu::require_keys(s, ctx + ".short_term", {}, {"delta", "xi", "shift_grid"});
    if (s.contains("delta")) cfg.engine.short_term.delta = jsonu::get_finite(s, "delta", ctx);
    if (s.contains("xi")) cfg.engine.short_term.xi = jsonu::get_finite(s, "xi", ctx);
    if (s.contains("shift_grid")) {
      const jsonu::Json& g = s.at("shift_grid");
      if (!g.is_array() || g.empty()) throw ValidationError(ctx + ": short_term.shift_grid must be a non-empty array");
      cfg.engine.short_term.shift_grid.clear();
      for (const jsonu::Json& v : g) {
        if (!v.is_number()) throw ValidationError(ctx + ": short_term.shift_grid entries must be numbers");
        cfg.engine.short_term.shift_grid.push_back(v.get<double>());
      }
    }
    validate(cfg.engine.short_term);
  }

  if (j.contains("oracle")) {
    const jsonu::Json& o = j.at("oracle");
    jsonu::require_keys(o, ctx + ".oracle", {"kind"},
                        {"same_id_mean", "noise_sd", "default_cross", "confusability"});
    const std::string kind = jsonu::get_string(o, "kind", ctx);
    if (kind == "cosine") {
      for (const char* key : {"same_id_mean", "noise_sd", "default_cross", "confusability"}) {
        if (o.contains(key)) {
          throw ValidationError(ctx + ": oracle." + std::string(key) + " only applies to synthetic_identity");
        }
      }
      cfg.oracle = SimilarityOracle::cosine();
    } else if (kind == "synthetic_identity") {
      SyntheticIdentityParams p;
      if (o.contains("same_id_mean")) p.same_id_mean = jsonu::get_finite(o, "same_id_mean", ctx);
      if (o.contains("noise_sd")) p.noise_sd = jsonu::get_finite(o, "noise_sd", ctx);
      if (o.contains("default_cross")) p.default_cross = jsonu::get_finite(o, "default_cross", ctx);
      if (o.contains("confusability")) {
        const jsonu::Json& c = o.at("confusability");
        if (!c.is_array()) throw ValidationError(ctx + ": oracle.confusability must be an array");
        for (const jsonu::Json& triple : c) {
          if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number_integer() ||
              !triple[1].is_number_integer() || !triple[2].is_number()) {
            throw ValidationError(ctx + ": oracle.confusability entries must be [id_a, id_b, score]");
          }
          const auto a = triple[0].get<std::int64_t>();
          const auto b = triple[1].get<std::int64_t>();
          p.confusability[{std::min(a, b), std::max(a, b)}] = triple[2].get<double>();
        }
      }
      cfg.oracle = SimilarityOracle::synthetic_identity(p);
    } else {
      throw ValidationError(ctx + ": oracle.kind must be cosine or synthetic_identity");
    }
  }
  return cfg;
}

inline jsonu::Json config_to_json(const EngineConfig& cfg) {
  jsonu::Json j;
  j["mode"] = to_string(cfg.engine.mode);
  j["seed"] = cfg.engine.seed;
  j["builder"] = {{"alpha", cfg.engine.builder.alpha},
                  {"beta", cfg.engine.builder.beta},
                  {"gamma", cfg.engine.builder.gamma}};
  j["dp"] = {{"w_ff", cfg.engine.dp.w_ff},
             {"w_loc", cfg.engine.dp.w_loc},
             {"max_gap", cfg.engine.dp.max_gap}};
  j["short_term"] = {{"delta", cfg.engine.short_term.delta},
                     {"xi", cfg.engine.short_term.xi},
                     {"shift_grid", cfg.engine.short_term.shift_grid}};
  if (cfg.oracle.kind() == OracleKind::kCosineEmbedding) {
    j["oracle"] = {{"kind", "cosine"}};
  } else {
    const SyntheticIdentityParams& p = cfg.oracle.synthetic_params();
    jsonu::Json confusability = jsonu::Json::array();
    for (const auto& [pair, score] : p.confusability) {
      confusability.push_back({pair.first, pair.second, score});
    }
    j["oracle"] = {{"kind", "synthetic_identity"},
                   {"same_id_mean", p.same_id_mean},
                   {"noise_sd", p.noise_sd},
                   {"default_cross", p.default_cross},
                   {"confusability", confusability}};
  }
  return j;
}

/// Scenario documents mirror ScenarioSpec. n_frames and objects are
/// required; geometry, detector noise, and seed have defaults.
inline ScenarioSpec scenario_from_json(const jsonu::Json& j) {
  const std::string ctx = "scenario";
  jsonu::require_keys(j, ctx, {"n_frames", "objects"}, {"frame_w", "frame_h", "detector", "seed"});
  ScenarioSpec spec;
  spec.n_frames = jsonu::get_int(j, "n_frames", ctx);
  if (j.contains("frame_w")) spec.frame_w = static_cast<int>(jsonu::get_int(j, "frame_w", ctx));
  if (j.contains("frame_h")) spec.frame_h = static_cast<int>(jsonu::get_int(j, "frame_h", ctx));
  if (j.contains("seed")) spec.seed = static_cast<std::uint64_t>(jsonu::get_int(j, "seed", ctx));
  if (j.contains("detector")) {
    const jsonu::Json& d = j.at("detector");
    jsonu::require_keys(d, ctx + ".detector", {}, {"miss_rate", "clutter_rate", "box_jitter_sd"});
    if (d.contains("miss_rate")) spec.detector.miss_rate = jsonu::get_finite(d, "miss_rate", ctx);
    if (d.contains("clutter_rate")) spec.detector.clutter_rate = jsonu::get_finite(d, "clutter_rate", ctx);
    if (d.contains("box_jitter_sd")) spec.detector.box_jitter_sd = jsonu::get_finite(d, "box_jitter_sd", ctx);
  }

  const jsonu::Json& objects = j.at("objects");
  if (!objects.is_array()) throw ValidationError(ctx + ": objects must be an array");
  for (const jsonu::Json& o : objects) {
    const std::string octx = ctx + ".objects[" + std::to_string(spec.objects.size()) + "]";
    jsonu::require_keys(o, octx, {"id", "trajectory", "embedding_prototype"},
                        {"is_target", "visibility", "embedding_noise_sd"});
    ObjectSpec obj;
    obj.id = jsonu::get_int(o, "id", octx);
    if (o.contains("is_target")) obj.is_target = jsonu::get_bool(o, "is_target", octx);
    const jsonu::Json& traj = o.at("trajectory");
    if (!traj.is_array() || traj.empty()) throw ValidationError(octx + ": trajectory must be a non-empty array");
    for (const jsonu::Json& w : traj) {
      jsonu::require_keys(w, octx + ".trajectory", {"t", "box"});
      obj.trajectory.push_back({jsonu::get_int(w, "t", octx), jsonu::get_box(w, "box", octx)});
    }
    if (o.contains("visibility")) {
      const jsonu::Json& vis = o.at("visibility");
      if (!vis.is_array()) throw ValidationError(octx + ": visibility must be an array of [start, end) pairs");
      for (const jsonu::Json& iv : vis) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_integer() || !iv[1].is_number_integer()) {
          throw ValidationError(octx + ": visibility entries must be [start, end] integer pairs");
        }
        obj.visibility.emplace_back(iv[0].get<std::int64_t>(), iv[1].get<std::int64_t>());
      }
    } else {
      obj.visibility = {{0, spec.n_frames}};
    }
    obj.embedding_prototype = jsonu::get_floats(o, "embedding_prototype", octx);
    if (o.contains("embedding_noise_sd")) {
      obj.embedding_noise_sd = jsonu::get_finite(o, "embedding_noise_sd", octx);
    }
    spec.objects.push_back(std::move(obj));
  }
  validate(spec);
  return spec;
}

inline jsonu::Json scenario_to_json(const ScenarioSpec& spec) {
  jsonu::Json j;
  j["n_frames"] = spec.n_frames;
  j["frame_w"] = spec.frame_w;
  j["frame_h"] = spec.frame_h;
  j["seed"] = spec.seed;
  j["detector"] = {{"miss_rate", spec.detector.miss_rate},
                   {"clutter_rate", spec.detector.clutter_rate},
                   {"box_jitter_sd", spec.detector.box_jitter_sd}};
  j["objects"] = jsonu::Json::array();
  for (const ObjectSpec& obj : spec.objects) {
    jsonu::Json o;
    o["id"] = obj.id;
    o["is_target"] = obj.is_target;
    o["trajectory"] = jsonu::Json::array();
    for (const Waypoint& w : obj.trajectory) {
      o["trajectory"].push_back({{"t", w.t}, {"box", jsonu::box_json(w.box)}});
    }
    o["visibility"] = jsonu::Json::array();
    for (const auto& [start, end] : obj.visibility) {
      o["visibility"].push_back({start, end});
    }
    o["embedding_prototype"] = jsonu::floats_json(obj.embedding_prototype);
    o["embedding_noise_sd"] = obj.embedding_noise_sd;
    j["objects"].push_back(std::move(o));
  }
  return j;
}

}  // namespace tdpa
