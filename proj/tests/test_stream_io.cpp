#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tdpa/config.hpp"
#include "tdpa/stream_io.hpp"

using namespace tdpa;

namespace {

StreamHeader header(int dim, std::int64_t n_frames) {
  StreamHeader h;
  h.frame_w = 1280;
  h.frame_h = 720;
  h.embedding_dim = dim;
  h.n_frames = n_frames;
  return h;
}

Detection stream_det(std::int64_t t, std::int64_t det_id, BBox box, double ff, std::vector<float> emb) {
  Detection d;
  d.t = t;
  d.det_id = det_id;
  d.box = box;
  d.ff_score = ff;
  d.ff_tracklet_score = 0.77;  // tracker state, must not survive a round trip
  d.embedding = std::move(emb);
  return d;
}

std::string matching(const std::string& needle) { return needle; }

}  // namespace

TEST_CASE("detection streams round-trip every serialized field") {
  std::vector<std::vector<Detection>> frames(3);
  frames[0].push_back(stream_det(0, 0, BBox(0.4, 0.4, 0.2, 0.2), 1.0, {1.0f, 0.0f}));
  frames[0].back().object_id = 7;
  // Frame 1 intentionally empty.
  frames[2].push_back(stream_det(2, 1, BBox(0.42, 0.41, 0.2, 0.2), 0.9, {0.9f, 0.1f}));
  frames[2].push_back(stream_det(2, 2, BBox(0.1, 0.1, 0.05, 0.05), 0.2, {0.0f, 1.0f}));

  std::stringstream ss;
  write_detection_stream(ss, header(2, 3), frames);
  const DetectionStream got = read_detection_stream(ss);

  CHECK(got.header.frame_w == 1280);
  CHECK(got.header.frame_h == 720);
  CHECK(got.header.embedding_dim == 2);
  CHECK(got.header.n_frames == 3);
  REQUIRE(got.frames.size() == 3);
  REQUIRE(got.frames[0].size() == 1);
  CHECK(got.frames[1].empty());
  REQUIRE(got.frames[2].size() == 2);

  const Detection& d0 = got.frames[0][0];
  CHECK(d0.t == 0);
  CHECK(d0.det_id == 0);
  CHECK(d0.box.x == 0.4);
  CHECK(d0.box.w == 0.2);
  CHECK(d0.ff_score == 1.0);
  CHECK(d0.embedding == std::vector<float>{1.0f, 0.0f});
  REQUIRE(d0.object_id.has_value());
  CHECK(*d0.object_id == 7);
  // ff_tracklet_score is engine state, not stream data.
  CHECK(d0.ff_tracklet_score == 0.0);
  CHECK_FALSE(got.frames[2][0].object_id.has_value());
}

TEST_CASE("detection stream writing validates shape") {
  std::vector<std::vector<Detection>> frames(2);
  frames[0].push_back(stream_det(0, 0, BBox(0.4, 0.4, 0.2, 0.2), 1.0, {1.0f}));
  std::stringstream ss;
  CHECK_THROWS_AS(write_detection_stream(ss, header(1, 3), frames), ValidationError);
  CHECK_THROWS_AS(write_detection_stream(ss, header(2, 2), frames), ValidationError);
  frames[1].push_back(stream_det(0, 1, BBox(0.4, 0.4, 0.2, 0.2), 1.0, {1.0f}));  // wrong t
  CHECK_THROWS_AS(write_detection_stream(ss, header(1, 2), frames), ValidationError);
}

TEST_CASE("detection stream reading rejects malformed input with line numbers") {
  const std::string good_header =
      R"({"format_version":1,"frame_w":1280,"frame_h":720,"embedding_dim":2,"n_frames":2})";
  const std::string good_line = R"({"t":0,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0,0.0],"det_id":0})";

  auto read = [](const std::string& text) {
    std::stringstream ss(text);
    return read_detection_stream(ss);
  };

  CHECK_THROWS_AS(read(""), ValidationError);
  CHECK_THROWS_WITH(read("not json\n"), Catch::Matchers::ContainsSubstring("line 1"));
  // Unknown header key.
  CHECK_THROWS_WITH(
      read(R"({"format_version":1,"frame_w":1,"frame_h":1,"embedding_dim":2,"n_frames":1,"fps":30})" "\n"),
      Catch::Matchers::ContainsSubstring("unknown key 'fps'"));
  // Wrong version, bad dims.
  CHECK_THROWS_WITH(
      read(R"({"format_version":2,"frame_w":1,"frame_h":1,"embedding_dim":2,"n_frames":1})" "\n"),
      Catch::Matchers::ContainsSubstring("format_version"));
  CHECK_THROWS_AS(
      read(R"({"format_version":1,"frame_w":0,"frame_h":1,"embedding_dim":2,"n_frames":1})" "\n"),
      ValidationError);
  CHECK_THROWS_AS(
      read(R"({"format_version":1,"frame_w":1,"frame_h":1,"embedding_dim":0,"n_frames":1})" "\n"),
      ValidationError);
  CHECK_THROWS_AS(
      read(R"({"format_version":1,"frame_w":1,"frame_h":1,"embedding_dim":2,"n_frames":0})" "\n"),
      ValidationError);

  // Detection lines: unknown key, t out of range, unsorted t, duplicate
  // det_id, wrong embedding width. Errors carry the offending line number.
  CHECK_THROWS_WITH(
      read(good_header + "\n" +
           R"({"t":0,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0,0.0],"det_id":0,"extra":1})" "\n"),
      Catch::Matchers::ContainsSubstring("line 2") && Catch::Matchers::ContainsSubstring("unknown key 'extra'"));
  CHECK_THROWS_WITH(
      read(good_header + "\n" +
           R"({"t":5,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0,0.0],"det_id":0})" "\n"),
      Catch::Matchers::ContainsSubstring("t outside"));
  CHECK_THROWS_WITH(
      read(good_header + "\n" +
           R"({"t":1,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0,0.0],"det_id":0})" "\n" +
           R"({"t":0,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0,0.0],"det_id":1})" "\n"),
      Catch::Matchers::ContainsSubstring("sorted by t"));
  CHECK_THROWS_WITH(
      read(good_header + "\n" + good_line + "\n" +
           R"({"t":1,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0,0.0],"det_id":0})" "\n"),
      Catch::Matchers::ContainsSubstring("duplicate det_id"));
  CHECK_THROWS_WITH(
      read(good_header + "\n" +
           R"({"t":0,"box":[0.4,0.4,0.2,0.2],"ff_score":1.0,"embedding":[1.0],"det_id":0})" "\n"),
      Catch::Matchers::ContainsSubstring(matching("embedding dimension")));
  // Non-finite numbers never parse as valid JSON numbers, but a null does.
  CHECK_THROWS_WITH(
      read(good_header + "\n" +
           R"({"t":0,"box":[0.4,0.4,0.2,0.2],"ff_score":null,"embedding":[1.0,0.0],"det_id":0})" "\n"),
      Catch::Matchers::ContainsSubstring("ff_score"));

  // Blank lines are tolerated.
  std::stringstream ok(good_header + "\n\n" + good_line + "\n");
  const DetectionStream got = read_detection_stream(ok);
  CHECK(got.frames[0].size() == 1);
}

TEST_CASE("truth files round-trip and enforce contiguous frames") {
  std::vector<TruthRecord> truth(3);
  truth[0] = {0, true, BBox(0.4, 0.4, 0.2, 0.2), 1};
  truth[1] = {1, false, BBox(), std::nullopt};
  truth[2] = {2, true, BBox(0.5, 0.5, 0.2, 0.2), 1};

  std::stringstream ss;
  write_truth(ss, truth);
  const auto got = read_truth(ss);
  REQUIRE(got.size() == 3);
  CHECK(got[0].present);
  CHECK(got[0].box.x == 0.4);
  REQUIRE(got[0].object_id.has_value());
  CHECK(*got[0].object_id == 1);
  CHECK_FALSE(got[1].present);
  CHECK_FALSE(got[1].object_id.has_value());
  CHECK(got[2].box.y == 0.5);

  auto read = [](const std::string& text) {
    std::stringstream in(text);
    return read_truth(in);
  };
  CHECK_THROWS_AS(read(""), ValidationError);
  CHECK_THROWS_WITH(read(R"({"t":0,"present":true})" "\n"), Catch::Matchers::ContainsSubstring("needs a box"));
  CHECK_THROWS_WITH(read(R"({"t":1,"present":false})" "\n"), Catch::Matchers::ContainsSubstring("contiguous"));
  CHECK_THROWS_WITH(read(R"({"t":0,"present":false,"score":1})" "\n"),
                    Catch::Matchers::ContainsSubstring("unknown key 'score'"));
}

TEST_CASE("prediction files round-trip and check the header count") {
  std::vector<PredictionRecord> preds(2);
  preds[0] = {0, BBox(0.4, 0.4, 0.2, 0.2), 0.9, true, 3};
  preds[1] = {1, BBox(0.1, 0.1, 0.2, 0.2), 0.0, false, std::nullopt};

  std::stringstream ss;
  write_predictions(ss, FrameDims{640, 480}, preds);
  const PredictionFile got = read_predictions(ss);
  CHECK(got.dims.width == 640);
  CHECK(got.dims.height == 480);
  REQUIRE(got.records.size() == 2);
  CHECK(got.records[0].confidence == 0.9);
  CHECK(got.records[0].present);
  REQUIRE(got.records[0].object_id.has_value());
  CHECK(*got.records[0].object_id == 3);
  CHECK_FALSE(got.records[1].present);

  auto read = [](const std::string& text) {
    std::stringstream in(text);
    return read_predictions(in);
  };
  CHECK_THROWS_WITH(read(R"({"format_version":1,"frame_w":640,"frame_h":480,"n_frames":2})" "\n" +
                         std::string(R"({"t":0,"box":[0.4,0.4,0.2,0.2],"confidence":0.9,"present":true})") + "\n"),
                    Catch::Matchers::ContainsSubstring("record count"));
  CHECK_THROWS_AS(read(""), ValidationError);
}

TEST_CASE("galleries and mined examples serialize as expected") {
  std::vector<GalleryEntry> entries(2);
  entries[0].entry_id = 0;
  entries[0].video_id = 4;
  entries[0].frame = 10;
  entries[0].box = BBox(0.2, 0.2, 0.1, 0.1);
  entries[0].embedding = {0.5f, 0.5f};
  entries[1].entry_id = 1;
  entries[1].video_id = 5;
  entries[1].frame = 11;
  entries[1].box = BBox(0.6, 0.6, 0.1, 0.1);
  entries[1].embedding = {0.1f, 0.9f};

  std::stringstream ss;
  write_gallery(ss, entries);
  const auto got = read_gallery(ss);
  REQUIRE(got.size() == 2);
  CHECK(got[0].entry_id == 0);
  CHECK(got[0].video_id == 4);
  CHECK(got[0].frame == 10);
  CHECK(got[0].box.x == 0.2);
  CHECK(got[0].embedding == std::vector<float>{0.5f, 0.5f});
  CHECK(got[1].video_id == 5);

  std::stringstream empty("");
  CHECK_THROWS_AS(read_gallery(empty), ValidationError);

  std::stringstream mined;
  write_mined(mined, {entries[0]}, {entries[1]});
  std::string line;
  REQUIRE(std::getline(mined, line));
  CHECK(line.find("\"role\":\"positive\"") != std::string::npos);
  CHECK(line.find("\"entry_id\":0") != std::string::npos);
  REQUIRE(std::getline(mined, line));
  CHECK(line.find("\"role\":\"negative\"") != std::string::npos);
  // Embeddings are training inputs, not mining outputs.
  CHECK(line.find("embedding") == std::string::npos);
}

TEST_CASE("evaluation reports serialize missing metrics as null") {
  EvalReport report;
  report.success_auc = 0.75;
  report.notes.push_back("precision_at_20px skipped: frame dimensions unknown");
  const jsonu::Json j = report_json(report);
  CHECK(j.at("success_auc").get<double>() == 0.75);
  CHECK(j.at("max_gm").is_null());
  CHECK(j.at("resets").is_null());
  REQUIRE(j.at("notes").is_array());
  CHECK(j.at("notes")[0].get<std::string>().find("frame dimensions") != std::string::npos);
}

TEST_CASE("tracker configs round-trip through JSON") {
  EngineConfig cfg;
  cfg.engine.mode = TrackerMode::kArgmax;
  cfg.engine.seed = 42;
  cfg.engine.builder.alpha = 0.6;
  cfg.engine.builder.beta = 0.2;
  cfg.engine.builder.gamma = 0.4;
  cfg.engine.dp.w_ff = 0.7;
  cfg.engine.dp.w_loc = 2.0;
  cfg.engine.dp.max_gap = 99;
  cfg.engine.short_term.delta = -0.5;
  cfg.engine.short_term.xi = 0.3;
  cfg.engine.short_term.shift_grid = {-1.0, 0.0, 1.0};
  SyntheticIdentityParams p;
  p.same_id_mean = 0.9;
  p.noise_sd = 0.05;
  p.default_cross = 0.2;
  p.confusability[{1, 2}] = 0.8;
  cfg.oracle = SimilarityOracle::synthetic_identity(p);

  const EngineConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.engine.mode == TrackerMode::kArgmax);
  CHECK(back.engine.seed == 42);
  CHECK(back.engine.builder.alpha == 0.6);
  CHECK(back.engine.builder.beta == 0.2);
  CHECK(back.engine.builder.gamma == 0.4);
  CHECK(back.engine.dp.w_ff == 0.7);
  CHECK(back.engine.dp.w_loc == 2.0);
  CHECK(back.engine.dp.max_gap == 99);
  CHECK(back.engine.short_term.delta == -0.5);
  CHECK(back.engine.short_term.xi == 0.3);
  CHECK(back.engine.short_term.shift_grid == std::vector<double>{-1.0, 0.0, 1.0});
  REQUIRE(back.oracle.kind() == OracleKind::kSyntheticIdentity);
  CHECK(back.oracle.synthetic_params().same_id_mean == 0.9);
  CHECK(back.oracle.synthetic_params().noise_sd == 0.05);
  CHECK(back.oracle.synthetic_params().default_cross == 0.2);
  const auto& conf = back.oracle.synthetic_params().confusability;
  REQUIRE(conf.count({1, 2}) == 1);
  CHECK(conf.at({1, 2}) == 0.8);

  // The default config round-trips too and stays on the cosine oracle.
  const EngineConfig defaults = config_from_json(config_to_json(EngineConfig{}));
  CHECK(defaults.engine.mode == TrackerMode::kTdpa);
  CHECK(defaults.oracle.kind() == OracleKind::kCosineEmbedding);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  auto parse = [](const char* text) { return config_from_json(jsonu::Json::parse(text)); };

  CHECK_THROWS_WITH(parse(R"({"modes":"tdpa"})"), Catch::Matchers::ContainsSubstring("unknown key 'modes'"));
  CHECK_THROWS_WITH(parse(R"({"builder":{"alpha":0.5,"alhpa":0.5}})"),
                    Catch::Matchers::ContainsSubstring("unknown key 'alhpa'"));
  CHECK_THROWS_WITH(parse(R"({"dp":{"wff":0.5}})"), Catch::Matchers::ContainsSubstring("unknown key 'wff'"));
  CHECK_THROWS_WITH(parse(R"({"short_term":{"zeta":0.5}})"),
                    Catch::Matchers::ContainsSubstring("unknown key 'zeta'"));
  CHECK_THROWS_AS(parse(R"({"mode":"greedy"})"), ValidationError);
  CHECK_THROWS_WITH(parse(R"({"builder":{"gamma":0.0}})"), Catch::Matchers::ContainsSubstring("gamma"));
  CHECK_THROWS_WITH(parse(R"({"dp":{"w_ff":1.5}})"), Catch::Matchers::ContainsSubstring("w_ff"));
  CHECK_THROWS_WITH(parse(R"({"dp":{"max_gap":0}})"), Catch::Matchers::ContainsSubstring("max_gap"));
  CHECK_THROWS_AS(parse(R"({"short_term":{"xi":0.0}})"), ValidationError);
  CHECK_THROWS_AS(parse(R"({"short_term":{"shift_grid":[]}})"), ValidationError);
  CHECK_THROWS_AS(parse(R"({"short_term":{"shift_grid":[1.0,2.0]}})"), ValidationError);  // no 0.0
  CHECK_THROWS_WITH(parse(R"({"oracle":{"kind":"learned"}})"), Catch::Matchers::ContainsSubstring("oracle.kind"));
  // Synthetic-only knobs are rejected on the cosine oracle.
  CHECK_THROWS_WITH(parse(R"({"oracle":{"kind":"cosine","noise_sd":0.1}})"),
                    Catch::Matchers::ContainsSubstring("synthetic_identity"));
  CHECK_THROWS_AS(parse(R"({"oracle":{"kind":"synthetic_identity","confusability":[[1,2]]}})"), ValidationError);

  // A partial config keeps defaults for everything it does not mention.
  const EngineConfig cfg = parse(R"({"dp":{"w_loc":3.0}})");
  CHECK(cfg.engine.dp.w_loc == 3.0);
  CHECK(cfg.engine.dp.w_ff == 0.5);
  CHECK(cfg.engine.builder.alpha == 0.5);
}

TEST_CASE("scenario documents parse, default, and validate") {
  const char* text = R"({
    "n_frames": 10,
    "seed": 5,
    "detector": {"miss_rate": 0.1, "clutter_rate": 2.0, "box_jitter_sd": 0.02},
    "objects": [
      {"id": 1, "is_target": true,
       "trajectory": [{"t": 0, "box": [0.1, 0.1, 0.2, 0.2]}, {"t": 9, "box": [0.7, 0.7, 0.2, 0.2]}],
       "visibility": [[0, 4], [6, 10]],
       "embedding_prototype": [1.0, 0.0],
       "embedding_noise_sd": 0.03},
      {"id": 2,
       "trajectory": [{"t": 0, "box": [0.8, 0.2, 0.1, 0.1]}],
       "embedding_prototype": [0.0, 1.0]}
    ]
  })";
  const ScenarioSpec spec = scenario_from_json(jsonu::Json::parse(text));
  CHECK(spec.n_frames == 10);
  CHECK(spec.seed == 5);
  CHECK(spec.frame_w == 1280);  // default geometry
  CHECK(spec.detector.miss_rate == 0.1);
  CHECK(spec.detector.clutter_rate == 2.0);
  REQUIRE(spec.objects.size() == 2);
  CHECK(spec.objects[0].is_target);
  CHECK(spec.objects[0].visibility == std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 4}, {6, 10}});
  CHECK(spec.objects[0].embedding_noise_sd == 0.03);
  CHECK_FALSE(spec.objects[1].is_target);
  // Visibility defaults to the whole clip.
  CHECK(spec.objects[1].visibility == std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 10}});

  // Round trip through scenario_to_json.
  const ScenarioSpec back = scenario_from_json(scenario_to_json(spec));
  CHECK(back.n_frames == spec.n_frames);
  CHECK(back.objects.size() == spec.objects.size());
  CHECK(back.objects[0].trajectory.size() == 2);
  CHECK(back.objects[0].trajectory[1].box.x == 0.7);

  auto parse = [](const std::string& s) { return scenario_from_json(jsonu::Json::parse(s)); };
  CHECK_THROWS_WITH(parse(R"({"objects":[]})"), Catch::Matchers::ContainsSubstring("n_frames"));
  CHECK_THROWS_WITH(parse(R"({"n_frames":10,"objects":[],"fps":30})"),
                    Catch::Matchers::ContainsSubstring("unknown key 'fps'"));
  // No target object: validate() rejects.
  CHECK_THROWS_AS(parse(R"({"n_frames":10,"objects":[
    {"id":1,"trajectory":[{"t":0,"box":[0.1,0.1,0.2,0.2]}],"embedding_prototype":[1.0]}]})"),
                  ValidationError);
  // Malformed visibility entry.
  CHECK_THROWS_AS(parse(R"({"n_frames":10,"objects":[
    {"id":1,"is_target":true,"trajectory":[{"t":0,"box":[0.1,0.1,0.2,0.2]}],
     "embedding_prototype":[1.0],"visibility":[[0]]}]})"),
                  ValidationError);
}

TEST_CASE("mode names round-trip and reject unknown strings") {
  CHECK(to_string(TrackerMode::kTdpa) == "tdpa");
  CHECK(to_string(TrackerMode::kArgmax) == "argmax");
  CHECK(to_string(TrackerMode::kShortTerm) == "short_term");
  CHECK(mode_from_string("tdpa") == TrackerMode::kTdpa);
  CHECK(mode_from_string("argmax") == TrackerMode::kArgmax);
  CHECK(mode_from_string("short_term") == TrackerMode::kShortTerm);
  CHECK_THROWS_AS(mode_from_string("greedy"), ValidationError);
  CHECK_THROWS_AS(mode_from_string(""), ValidationError);
}
