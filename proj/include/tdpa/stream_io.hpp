#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "tdpa/errors.hpp"
#include "tdpa/json_util.hpp"
#include "tdpa/metrics.hpp"
#include "tdpa/mining.hpp"
#include "tdpa/records.hpp"

namespace tdpa {

/// ND-JSON detection stream: one header line, then one line per detection,
/// sorted by frame. Frames are allowed to be empty, which is why the header
/// carries n_frames. ff_tracklet_score is tracker state, not stream data,
/// and is never serialized.
struct StreamHeader {
  int format_version = 1;
  int frame_w = 0;
  int frame_h = 0;
  int embedding_dim = 0;
  std::int64_t n_frames = 0;
};

struct DetectionStream {
  StreamHeader header;
  std::vector<std::vector<Detection>> frames;
};

inline void write_detection_stream(std::ostream& os, const StreamHeader& header,
                                   const std::vector<std::vector<Detection>>& frames) {
  if (static_cast<std::int64_t>(frames.size()) != header.n_frames) {
    throw ValidationError("write_detection_stream: frame count disagrees with header");
  }
  jsonu::Json h;
  h["format_version"] = header.format_version;
  h["frame_w"] = header.frame_w;
  h["frame_h"] = header.frame_h;
  h["embedding_dim"] = header.embedding_dim;
  h["n_frames"] = header.n_frames;
  os << h.dump() << '\n';
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (const Detection& d : frames[t]) {
      if (d.t != static_cast<std::int64_t>(t)) {
        throw ValidationError("write_detection_stream: detection timestamp disagrees with its frame");
      }
      if (d.embedding.size() != static_cast<std::size_t>(header.embedding_dim)) {
        throw ValidationError("write_detection_stream: embedding dimension disagrees with header");
      }
      jsonu::Json line;
      line["t"] = d.t;
      line["box"] = jsonu::box_json(d.box);
      line["ff_score"] = d.ff_score;
      line["embedding"] = jsonu::floats_json(d.embedding);
      if (d.object_id) line["object_id"] = *d.object_id;
      line["det_id"] = d.det_id;
      os << line.dump() << '\n';
    }
  }
}

inline DetectionStream read_detection_stream(std::istream& is) {
  const std::string ctx = "detection stream";
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(is, line)) throw ValidationError(ctx + ": empty file");
  ++line_no;
  const jsonu::Json h = jsonu::parse_line(line, line_no, ctx);
  jsonu::require_keys(h, ctx + " header", {"format_version", "frame_w", "frame_h", "embedding_dim", "n_frames"});
  DetectionStream stream;
  stream.header.format_version = static_cast<int>(jsonu::get_int(h, "format_version", ctx));
  if (stream.header.format_version != 1) throw ValidationError(ctx + ": unsupported format_version");
  stream.header.frame_w = static_cast<int>(jsonu::get_int(h, "frame_w", ctx));
  stream.header.frame_h = static_cast<int>(jsonu::get_int(h, "frame_h", ctx));
  stream.header.embedding_dim = static_cast<int>(jsonu::get_int(h, "embedding_dim", ctx));
  stream.header.n_frames = jsonu::get_int(h, "n_frames", ctx);
  if (stream.header.frame_w <= 0 || stream.header.frame_h <= 0) {
    throw ValidationError(ctx + ": frame dimensions must be positive");
  }
  if (stream.header.embedding_dim <= 0) throw ValidationError(ctx + ": embedding_dim must be positive");
  if (stream.header.n_frames < 1) throw ValidationError(ctx + ": n_frames must be >= 1");

  stream.frames.resize(static_cast<std::size_t>(stream.header.n_frames));
  std::unordered_set<std::int64_t> det_ids;
  std::int64_t last_t = -1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = ctx + " line " + std::to_string(line_no);
    const jsonu::Json j = jsonu::parse_line(line, line_no, ctx);
    jsonu::require_keys(j, where, {"t", "box", "ff_score", "embedding", "det_id"}, {"object_id"});
    Detection d;
    d.t = jsonu::get_int(j, "t", where);
    if (d.t < 0 || d.t >= stream.header.n_frames) throw ValidationError(where + ": t outside [0, n_frames)");
    if (d.t < last_t) throw ValidationError(where + ": detections must be sorted by t");
    last_t = d.t;
    d.box = jsonu::get_box(j, "box", where);
    d.ff_score = jsonu::get_finite(j, "ff_score", where);
    d.embedding = jsonu::get_floats(j, "embedding", where);
    if (d.embedding.size() != static_cast<std::size_t>(stream.header.embedding_dim)) {
      throw ValidationError(where + ": embedding dimension disagrees with header");
    }
    if (j.contains("object_id")) d.object_id = jsonu::get_int(j, "object_id", where);
    d.det_id = jsonu::get_int(j, "det_id", where);
    if (!det_ids.insert(d.det_id).second) throw ValidationError(where + ": duplicate det_id");
    stream.frames[static_cast<std::size_t>(d.t)].push_back(std::move(d));
  }
  return stream;
}

/// Ground truth ND-JSON: one line per frame, t contiguous from 0. Absent
/// frames carry no box.
inline void write_truth(std::ostream& os, const std::vector<TruthRecord>& truth) {
  for (const TruthRecord& tr : truth) {
    jsonu::Json line;
    line["t"] = tr.t;
    line["present"] = tr.present;
    if (tr.present) line["box"] = jsonu::box_json(tr.box);
    if (tr.object_id) line["object_id"] = *tr.object_id;
    os << line.dump() << '\n';
  }
}

inline std::vector<TruthRecord> read_truth(std::istream& is) {
  const std::string ctx = "truth stream";
  std::vector<TruthRecord> truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = ctx + " line " + std::to_string(line_no);
    const jsonu::Json j = jsonu::parse_line(line, line_no, ctx);
    jsonu::require_keys(j, where, {"t", "present"}, {"box", "object_id"});
    TruthRecord tr;
    tr.t = jsonu::get_int(j, "t", where);
    tr.present = jsonu::get_bool(j, "present", where);
    if (tr.present && !j.contains("box")) throw ValidationError(where + ": present frame needs a box");
    if (j.contains("box")) tr.box = jsonu::get_box(j, "box", where);
    if (j.contains("object_id")) tr.object_id = jsonu::get_int(j, "object_id", where);
    if (tr.t != static_cast<std::int64_t>(truth.size())) {
      throw ValidationError(where + ": truth frames must be contiguous from 0");
    }
    truth.push_back(tr);
  }
  if (truth.empty()) throw ValidationError(ctx + ": empty file");
  return truth;
}

/// Prediction ND-JSON: header with the frame geometry, then one line per
/// frame, t contiguous from 0.
struct PredictionFile {
  FrameDims dims;
  std::vector<PredictionRecord> records;
};

inline void write_predictions(std::ostream& os, const FrameDims& dims,
                              const std::vector<PredictionRecord>& records) {
  jsonu::Json h;
  h["format_version"] = 1;
  h["frame_w"] = dims.width;
  h["frame_h"] = dims.height;
  h["n_frames"] = records.size();
  os << h.dump() << '\n';
  for (const PredictionRecord& p : records) {
    jsonu::Json line;
    line["t"] = p.t;
    line["box"] = jsonu::box_json(p.box);
    line["confidence"] = p.confidence;
    line["present"] = p.present;
    if (p.object_id) line["object_id"] = *p.object_id;
    os << line.dump() << '\n';
  }
}

inline PredictionFile read_predictions(std::istream& is) {
  const std::string ctx = "prediction stream";
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw ValidationError(ctx + ": empty file");
  ++line_no;
  const jsonu::Json h = jsonu::parse_line(line, line_no, ctx);
  jsonu::require_keys(h, ctx + " header", {"format_version", "frame_w", "frame_h", "n_frames"});
  if (jsonu::get_int(h, "format_version", ctx) != 1) throw ValidationError(ctx + ": unsupported format_version");
  PredictionFile file;
  file.dims.width = static_cast<int>(jsonu::get_int(h, "frame_w", ctx));
  file.dims.height = static_cast<int>(jsonu::get_int(h, "frame_h", ctx));
  const std::int64_t n_frames = jsonu::get_int(h, "n_frames", ctx);

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = ctx + " line " + std::to_string(line_no);
    const jsonu::Json j = jsonu::parse_line(line, line_no, ctx);
    jsonu::require_keys(j, where, {"t", "box", "confidence", "present"}, {"object_id"});
    PredictionRecord p;
    p.t = jsonu::get_int(j, "t", where);
    p.box = jsonu::get_box(j, "box", where);
    p.confidence = jsonu::get_finite(j, "confidence", where);
    p.present = jsonu::get_bool(j, "present", where);
    if (j.contains("object_id")) p.object_id = jsonu::get_int(j, "object_id", where);
    if (p.t != static_cast<std::int64_t>(file.records.size())) {
      throw ValidationError(where + ": prediction frames must be contiguous from 0");
    }
    file.records.push_back(p);
  }
  if (static_cast<std::int64_t>(file.records.size()) != n_frames) {
    throw ValidationError(ctx + ": record count disagrees with header");
  }
  return file;
}

/// Gallery ND-JSON: one entry per line.
inline void write_gallery(std::ostream& os, const std::vector<GalleryEntry>& entries) {
  for (const GalleryEntry& e : entries) {
    jsonu::Json line;
    line["video_id"] = e.video_id;
    line["frame"] = e.frame;
    line["box"] = jsonu::box_json(e.box);
    line["embedding"] = jsonu::floats_json(e.embedding);
    line["entry_id"] = e.entry_id;
    os << line.dump() << '\n';
  }
}

inline std::vector<GalleryEntry> read_gallery(std::istream& is) {
  const std::string ctx = "gallery";
  std::vector<GalleryEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = ctx + " line " + std::to_string(line_no);
    const jsonu::Json j = jsonu::parse_line(line, line_no, ctx);
    jsonu::require_keys(j, where, {"video_id", "frame", "box", "embedding", "entry_id"});
    GalleryEntry e;
    e.video_id = jsonu::get_int(j, "video_id", where);
    e.frame = jsonu::get_int(j, "frame", where);
    e.box = jsonu::get_box(j, "box", where);
    e.embedding = jsonu::get_floats(j, "embedding", where);
    e.entry_id = jsonu::get_int(j, "entry_id", where);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ValidationError(ctx + ": empty file");
  return entries;
}

/// Mined example ND-JSON: gallery entries tagged by their training role.
inline void write_mined(std::ostream& os, const std::vector<GalleryEntry>& positives,
                        const std::vector<GalleryEntry>& negatives) {
  auto emit = [&os](const GalleryEntry& e, const char* role) {
    jsonu::Json line;
    line["role"] = role;
    line["video_id"] = e.video_id;
    line["frame"] = e.frame;
    line["box"] = jsonu::box_json(e.box);
    line["entry_id"] = e.entry_id;
    os << line.dump() << '\n';
  };
  for (const GalleryEntry& e : positives) emit(e, "positive");
  for (const GalleryEntry& e : negatives) emit(e, "negative");
}

inline jsonu::Json report_json(const EvalReport& report) {
  jsonu::Json j;
  auto put = [&j](const char* key, const auto& opt) {
    if (opt) {
      j[key] = *opt;
    } else {
      j[key] = nullptr;
    }
  };
  put("success_auc", report.success_auc);
  put("precision_at_20px", report.precision_at_20px);
  put("f_max", report.f_max);
  put("pr_at_fmax", report.pr_at_fmax);
  put("re_at_fmax", report.re_at_fmax);
  put("max_gm", report.max_gm);
  put("tpr", report.tpr);
  put("tnr", report.tnr);
  put("resets", report.resets);
  put("reset_accuracy", report.reset_accuracy);
  put("identity_accuracy", report.identity_accuracy);
  j["notes"] = report.notes;
  return j;
}

}  // namespace tdpa
