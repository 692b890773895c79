#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "crtrack/config.hpp"
#include "crtrack/mot_io.hpp"
#include "doctest.h"

using namespace crtrack;

namespace {

std::string temp_path(const std::string& name) {
  static const std::filesystem::path dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "crtrack_io_tests";
    std::filesystem::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string caught(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

bool mentions(const std::string& msg, const std::string& needle) {
  return msg.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("gt rows land on zero-based frames with defaulted fields") {
  const std::string path = temp_path("gt_basic.txt");
  write_file(path,
             "1,1,10,20,30,40,1,1,0.8\n"
             "\n"
             "3,2,5,6,7,8,1\n");
  const GtSequence gt = read_gt(path);
  REQUIRE(gt.size() == 2);
  REQUIRE(gt.count(0) == 1);
  REQUIRE(gt.count(2) == 1);
  const GtBox& a = gt.at(0)[0];
  CHECK(a.id == 1);
  CHECK(a.box.x_left == 10.0);
  CHECK(a.box.y_top == 20.0);
  CHECK(a.box.width == 30.0);
  CHECK(a.box.height == 40.0);
  CHECK(a.cls == 1);
  CHECK(a.visibility == 0.8);
  const GtBox& b = gt.at(2)[0];
  CHECK(b.cls == 1);         // seven-field row takes the defaults
  CHECK(b.visibility == 1.0);
}

TEST_CASE("result rows carry scores and shift frames the same way") {
  const std::string path = temp_path("res_basic.txt");
  write_file(path, "1,4,10,20,30,40,0.75,-1,-1,-1\n");
  const ResultSequence res = read_results(path);
  REQUIRE(res.count(0) == 1);
  CHECK(res.at(0)[0].id == 4);
  CHECK(res.at(0)[0].score == 0.75);
}

TEST_CASE("write then read is exact and a second write is byte-identical") {
  GtSequence gt;
  gt[0].push_back({1, {10.1, 20.25, 30.5, 40.125}, 1, 1.0});
  gt[0].push_back({2, {1.0 / 3.0, 0.001, 55, 66}, 7, 0.45});
  gt[9].push_back({3, {0, 0, 5.5, 80}, 1, 0.1});
  const std::string p1 = temp_path("gt_rt1.txt");
  const std::string p2 = temp_path("gt_rt2.txt");
  write_gt(p1, gt);
  const GtSequence back = read_gt(p1);
  REQUIRE(back.size() == gt.size());
  for (const auto& [frame, boxes] : gt) {
    const auto& other = back.at(frame);
    REQUIRE(other.size() == boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      CHECK(other[i].id == boxes[i].id);
      CHECK(other[i].box.x_left == boxes[i].box.x_left);
      CHECK(other[i].box.y_top == boxes[i].box.y_top);
      CHECK(other[i].box.width == boxes[i].box.width);
      CHECK(other[i].box.height == boxes[i].box.height);
      CHECK(other[i].cls == boxes[i].cls);
      CHECK(other[i].visibility == boxes[i].visibility);
    }
  }
  write_gt(p2, back);
  CHECK(slurp(p1) == slurp(p2));

  ResultSequence res;
  res[0].push_back({9, {4.5, 6.25, 10, 12}, 0.875});
  res[3].push_back({2, {0.1, 0.2, 0.3, 0.4}, 1.0 / 7.0});
  const std::string r1 = temp_path("res_rt1.txt");
  const std::string r2 = temp_path("res_rt2.txt");
  write_results(r1, res);
  write_results(r2, read_results(r1));
  CHECK(slurp(r1) == slurp(r2));
  CHECK(read_results(r1).at(3)[0].score == 1.0 / 7.0);
}

TEST_CASE("parse failures list every offending line with the path") {
  const std::string path = temp_path("gt_bad.txt");
  write_file(path,
             "1,1,10,20,30,40,1\n"
             "0,1,10,20,30,40,1\n"
             "2,1,10,20,30,oops,1\n"
             "3,1,10,20,0,40,1\n"
             "4,0,10,20,30,40,1\n"
             "5,6,7\n");
  const std::string msg = caught([&] { read_gt(path); });
  CHECK(mentions(msg, path));
  CHECK(mentions(msg, "parse error"));
  CHECK(mentions(msg, "line 2: frame must be an integer >= 1"));
  CHECK(mentions(msg, "line 3: field 6 is not a finite number"));
  CHECK(mentions(msg, "line 4: box width and height must be positive"));
  CHECK(mentions(msg, "line 5: ground truth id must be >= 1"));
  CHECK(mentions(msg, "line 6: expected 7 to 10 fields, got 3"));

  CHECK(mentions(caught([] { read_gt("/does/not/exist.txt"); }), "cannot open"));
  CHECK(mentions(caught([] { write_gt("/does/not/exist/gt.txt", GtSequence{}); }),
                 "cannot open"));
}

TEST_CASE("detection files ignore the id column and keep scores") {
  const std::string path = temp_path("det_basic.txt");
  write_file(path,
             "1,-1,10,20,30,40,0.9,-1,-1,-1\n"
             "1,-1,60,20,30,40,0.5,-1,-1,-1\n"
             "2,-1,11,21,30,40,0.8,-1,-1,-1\n");
  DetectionMap dets = read_detections(path);
  REQUIRE(dets.at(0).size() == 2);
  REQUIRE(dets.at(1).size() == 1);
  CHECK(dets.at(0)[0].score == 0.9);
  CHECK(dets.at(0)[1].box.x_left == 60.0);
  CHECK_FALSE(dets.at(0)[0].embedding.has_value());

  const std::string copy = temp_path("det_copy.txt");
  write_detections(copy, dets);
  const std::string again = temp_path("det_again.txt");
  write_detections(again, read_detections(copy));
  CHECK(slurp(copy) == slurp(again));
}

TEST_CASE("the embedding sidecar fills matching detections and skips the rest") {
  const std::string det_path = temp_path("emb_det.txt");
  write_file(det_path,
             "1,-1,10,20,30,40,0.9,-1,-1,-1\n"
             "1,-1,60,20,30,40,0.5,-1,-1,-1\n"
             "2,-1,11,21,30,40,0.8,-1,-1,-1\n");
  DetectionMap dets = read_detections(det_path);

  const std::string emb_path = temp_path("emb_basic.csv");
  write_file(emb_path,
             "frame,det,d0,d1\n"
             "1,0,1,0\n"
             "1,1,0.5,-0.25\n");
  read_embeddings(emb_path, dets);
  REQUIRE(dets.at(0)[0].embedding.has_value());
  CHECK(dets.at(0)[0].embedding->values == std::vector<double>{1.0, 0.0});
  CHECK(dets.at(0)[1].embedding->values == std::vector<double>{0.5, -0.25});
  CHECK_FALSE(dets.at(1)[0].embedding.has_value());  // no row, motion-only

  const std::string out_path = temp_path("emb_out.csv");
  write_embeddings(out_path, dets);
  CHECK(slurp(out_path).rfind("frame,det,d0,d1\n", 0) == 0);

  DetectionMap fresh = read_detections(det_path);
  read_embeddings(out_path, fresh);
  CHECK(fresh.at(0)[0].embedding->values == dets.at(0)[0].embedding->values);
  CHECK(fresh.at(0)[1].embedding->values == dets.at(0)[1].embedding->values);
  CHECK_FALSE(fresh.at(1)[0].embedding.has_value());
}

TEST_CASE("sidecar format violations are rejected with line numbers") {
  const std::string det_path = temp_path("emb_det2.txt");
  write_file(det_path, "1,-1,10,20,30,40,0.9,-1,-1,-1\n");
  DetectionMap dets = read_detections(det_path);

  const std::string p = temp_path("emb_bad.csv");
  write_file(p, "frame,idx,d0\n1,0,1\n");
  CHECK(mentions(caught([&] { read_embeddings(p, dets); }),
                 "header must be frame,det,d0"));

  write_file(p, "frame,det,d0,d2\n");
  CHECK(mentions(caught([&] { read_embeddings(p, dets); }),
                 "header dimension columns must be d0,d1,..."));

  write_file(p, "frame,det,d0,d1\n1,0,1\n");
  CHECK(mentions(caught([&] { read_embeddings(p, dets); }),
                 "line 2: expected 4 fields, got 3"));

  write_file(p, "frame,det,d0\n1,0,1\n1,0,2\n");
  CHECK(mentions(caught([&] { read_embeddings(p, dets); }),
                 "line 3: rows must be sorted by (frame, det)"));

  write_file(p, "frame,det,d0\n5,0,1\n");
  CHECK(mentions(caught([&] { read_embeddings(p, dets); }),
                 "no detection at frame 5 det 0"));

  write_file(p, "frame,det,d0\n1,2,1\n");
  CHECK(mentions(caught([&] { read_embeddings(p, dets); }),
                 "no detection at frame 1 det 2"));

  DetectionMap bare = read_detections(det_path);
  CHECK(mentions(caught([&] { write_embeddings(temp_path("emb_none.csv"), bare); }),
                 "no embeddings to write"));

  dets.at(0)[0].embedding = EmbeddingVec{std::vector<double>{1.0, 2.0}};
  dets[5].push_back({5, {0, 0, 4, 4}, 1.0, EmbeddingVec{std::vector<double>{1.0}}});
  CHECK(mentions(caught([&] { write_embeddings(temp_path("emb_mix.csv"), dets); }),
                 "mixed dimensions"));
}

TEST_CASE("config defaults round trip through serialize and parse") {
  const Config def;
  CHECK(def.get_double("assoc.iou_gate") == 0.3);
  CHECK(def.get_int("assoc.max_age") == 30);
  CHECK(def.get_bool("assoc.second_stage"));
  CHECK(def.raw("assoc.similarity_mode") == "split_cosine");

  const std::string text = def.serialize();
  CHECK(text.rfind("anu.keep_rate = 0.999\n", 0) == 0);  // sorted by key
  std::istringstream lines(text);
  std::string prev, line;
  while (std::getline(lines, line)) {
    CHECK(prev < line);
    prev = line;
  }
  CHECK(Config::from_string(text).serialize() == text);

  Config tweaked;
  tweaked.set("corrupt.severity", "0.6");
  tweaked.set("synth.crossings", "2");
  const Config reparsed = Config::from_string(tweaked.serialize());
  CHECK(reparsed.serialize() == tweaked.serialize());
  CHECK(reparsed.corruption().severity == 0.6);
  CHECK(reparsed.scenario().crossings == 2);
}

TEST_CASE("config text accepts comments and rejects bad lines with numbers") {
  const Config cfg = Config::from_string(
      "# tracker settings\n"
      "assoc.max_age = 12  # frames\n"
      "\n"
      "synth.crossings=2\n");
  CHECK(cfg.get_int("assoc.max_age") == 12);
  CHECK(cfg.scenario().crossings == 2);

  std::string msg = caught([] { Config::from_string("bogus.key = 1\n", "inline"); });
  CHECK(mentions(msg, "inline: invalid config"));
  CHECK(mentions(msg, "line 1: unknown config key 'bogus.key'"));

  msg = caught([] {
    Config::from_string("assoc.max_age = 1\nassoc.max_age = 2\n");
  });
  CHECK(mentions(msg, "line 2: duplicate key 'assoc.max_age'"));
  CHECK(mentions(msg, "first set on line 1"));

  msg = caught([] { Config::from_string("no equals sign\n"); });
  CHECK(mentions(msg, "line 1: expected key = value"));

  msg = caught([] { Config::from_string("assoc.max_age =\n"); });
  CHECK(mentions(msg, "line 1: empty key or value"));

  CHECK(mentions(caught([] { Config::from_file("/no/such/config"); }), "cannot open"));
}

TEST_CASE("config values are validated at access time") {
  Config cfg;
  CHECK_THROWS_WITH_AS(cfg.set("nope", "1"),
                       doctest::Contains("unknown config key 'nope'"),
                       std::runtime_error);

  cfg.set("assoc.iou_gate", "abc");
  CHECK(mentions(caught([&] { cfg.get_double("assoc.iou_gate"); }),
                 "not a finite number"));
  CHECK(mentions(caught([&] { cfg.association(); }), "not a finite number"));

  Config other;
  other.set("assoc.max_age", "2.5");
  CHECK(mentions(caught([&] { other.get_int("assoc.max_age"); }),
                 "not an integer"));
  other.set("assoc.max_age", "30");
  other.set("assoc.second_stage", "yes");
  CHECK(mentions(caught([&] { other.get_bool("assoc.second_stage"); }),
                 "not a boolean"));
  other.set("assoc.second_stage", "0");
  CHECK_FALSE(other.get_bool("assoc.second_stage"));
  other.set("assoc.second_stage", "1");
  CHECK(other.get_bool("assoc.second_stage"));

  other.set("assoc.similarity_mode", "fancy");
  CHECK(mentions(caught([&] { other.association(); }),
                 "expected split_cosine or matrix_product"));
  other.set("assoc.similarity_mode", "matrix_product");
  CHECK(other.association().similarity_mode == SimilarityMode::matrix_product);

  other.set("loss.unlabeled_weight_mode", "sometimes");
  CHECK(mentions(caught([&] { other.unlabeled_mode(); }),
                 "expected ratio_to_labeled or fraction_of_batch"));
  other.set("loss.unlabeled_weight_mode", "fraction_of_batch");
  CHECK(other.unlabeled_mode() == UnlabeledWeightMode::fraction_of_batch);
}

TEST_CASE("config builders reproduce the documented defaults") {
  const Config cfg;

  const AssociationConfig a = cfg.association();
  CHECK(a.iou_gate == 0.3);
  CHECK(a.appearance_weight == 0.25);
  CHECK(a.similarity_threshold == 0.25);
  CHECK(a.ocm_weight == 0.2);
  CHECK(a.velocity_span == 3);
  CHECK(a.min_hits == 3);
  CHECK(a.max_age == 30);
  CHECK(a.second_stage_enabled);
  CHECK(a.oru_enabled);
  CHECK(a.similarity_mode == SimilarityMode::split_cosine);
  CHECK(a.bank_capacity == 10);
  CHECK(a.ema_alpha == 0.9);
  CHECK(a.kalman.process_velocity_noise == 0.01);

  const AsaConfig asa_cfg = cfg.asa();
  CHECK(asa_cfg.k == 10);
  CHECK(asa_cfg.negative_cost_threshold == 6.0);
  CHECK(asa_cfg.candidate_radius_scale == 2.5);
  CHECK_FALSE(asa_cfg.soft_targets);
  const AsaWeights aw = cfg.asa_weights();
  CHECK(aw.lambda_cls == 1.0);
  CHECK(aw.lambda_reg == 1.0);
  CHECK(aw.lambda_iou == 3.0);
  CHECK(aw.lambda_dis == 2.0);

  const LossWeights lw = cfg.loss_weights();
  CHECK(lw.lambda_cls == 1.0);
  CHECK(lw.lambda_reg == 1.0);
  CHECK(lw.lambda_iou == 3.0);
  CHECK(cfg.unlabeled_mode() == UnlabeledWeightMode::ratio_to_labeled);
  CHECK(cfg.pseudo_confidence_threshold() == 0.7);
  CHECK(cfg.pseudo_nms_iou() == 0.65);
  CHECK(cfg.anu_keep_rate() == 0.999);

  const AugmentRanges ar = cfg.augment();
  CHECK(ar.contrast == 0.7);
  CHECK(ar.gamma == 2.2);
  CHECK(ar.brightness_min == 0.2);
  CHECK(ar.brightness_max == 0.5);
  CHECK(ar.blur_sigma_min == 0.5);
  CHECK(ar.blur_sigma_max == 2.0);
  CHECK(ar.noise_sigma_min == 2.0);
  CHECK(ar.noise_sigma_max == 15.0);

  const MetricsConfig mc = cfg.metrics();
  CHECK(mc.iou_threshold == 0.5);
  CHECK(mc.min_visibility == 0.1);
  CHECK(mc.pedestrian_class == 1);

  const ScenarioConfig sc = cfg.scenario();
  CHECK(sc.num_frames == 100);
  CHECK(sc.num_objects == 8);
  CHECK(sc.width == 1920);
  CHECK(sc.height == 1080);
  CHECK(sc.speed_min == 2.0);
  CHECK(sc.speed_max == 6.0);
  CHECK(sc.crossings == 0);
  CHECK_FALSE(sc.bounce_crossings);

  const CorruptionConfig cc = cfg.corruption();
  CHECK(cc.severity == 0.0);
  CHECK(cc.miss_rate == 0.25);
  CHECK(cc.jitter == 0.12);
  CHECK(cc.fp_rate == 0.6);
  CHECK(cc.score_noise == 0.25);
  CHECK(cc.embedding_noise == 0.06);
  CHECK(cc.occlusion_iou == 0.4);
  CHECK(cc.embedding_dim == 16);
}
