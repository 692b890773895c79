#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crtrack/anu.hpp"
#include "crtrack/asa.hpp"
#include "crtrack/association.hpp"
#include "crtrack/augment.hpp"
#include "crtrack/config.hpp"
#include "crtrack/metrics.hpp"
#include "crtrack/mot_io.hpp"
#include "crtrack/rng.hpp"
#include "crtrack/ssl_loss.hpp"
#include "crtrack/synth.hpp"

namespace fs = std::filesystem;
using namespace crtrack;

namespace {

std::string fmt_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Config load_config(const std::string& path, const std::vector<std::string>& sets) {
  Config cfg = path.empty() ? Config{} : Config::from_file(path);
  for (const std::string& s : sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + s + "'");
    auto trim = [](std::string t) {
      const auto a = t.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string{};
      const auto b = t.find_last_not_of(" \t");
      return t.substr(a, b - a + 1);
    };
    cfg.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return cfg;
}

void echo_config(const Config& cfg, const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
  std::ofstream out(dir / "effective.cfg");
  if (!out) throw std::runtime_error((dir / "effective.cfg").string() + ": cannot write");
  out << cfg.serialize();
}

ResultSequence run_tracker(const AssociationConfig& cfg, const DetectionMap& dets) {
  Tracker tracker(cfg);
  ResultSequence res;
  for (const auto& [frame, frame_dets] : dets)
    for (const auto& out : tracker.track_step(frame, frame_dets))
      res[frame].push_back({out.track_id, out.box, out.score});
  return res;
}

// Numbered-line reader shared by the small text formats.
std::vector<std::pair<int, std::string>> content_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::vector<std::pair<int, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    out.emplace_back(lineno, line.substr(a, b - a + 1));
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& path, int lineno,
                                  const std::string& text, int expected = -1) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    std::replace(tok.begin(), tok.end(), ',', ' ');
    std::istringstream inner(tok);
    std::string piece;
    while (inner >> piece) {
      double v = 0.0;
      const auto res = std::from_chars(piece.data(), piece.data() + piece.size(), v);
      if (res.ec != std::errc() || res.ptr != piece.data() + piece.size() ||
          !std::isfinite(v))
        throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": '" +
                                 piece + "' is not a finite number");
      out.push_back(v);
    }
  }
  if (expected >= 0 && static_cast<int>(out.size()) != expected)
    throw std::runtime_error(path + ": line " + std::to_string(lineno) + ": expected " +
                             std::to_string(expected) + " numbers, got " +
                             std::to_string(out.size()));
  return out;
}

struct EvalTable {
  std::vector<std::string> names;
  std::vector<MetricReport> rows;
};

void print_metric_table(const EvalTable& table) {
  std::size_t w = 8;
  for (const auto& n : table.names) w = std::max(w, n.size());
  std::printf("%-*s %8s %8s %8s %8s %8s %6s %6s %6s\n", static_cast<int>(w),
              "sequence", "DetA", "MOTA", "HOTA", "IDF1", "AssA", "FP", "FN", "IDSW");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const MetricReport& r = table.rows[i];
    std::printf("%-*s %8.3f %8.3f %8.3f %8.3f %8.3f %6lld %6lld %6lld\n",
                static_cast<int>(w), table.names[i].c_str(), r.deta, r.mota, r.hota,
                r.idf1, r.assa, r.fp, r.fn, r.idsw);
  }
}

void write_metric_kv(std::ostream& out, const std::string& prefix, const MetricReport& r) {
  out << prefix << ".deta = " << fmt_num(r.deta) << '\n'
      << prefix << ".mota = " << fmt_num(r.mota) << '\n'
      << prefix << ".hota = " << fmt_num(r.hota) << '\n'
      << prefix << ".idf1 = " << fmt_num(r.idf1) << '\n'
      << prefix << ".assa = " << fmt_num(r.assa) << '\n'
      << prefix << ".ap50 = " << fmt_num(r.ap50) << '\n'
      << prefix << ".ap50_95 = " << fmt_num(r.ap50_95) << '\n'
      << prefix << ".ar = " << fmt_num(r.ar) << '\n'
      << prefix << ".tp = " << r.tp << '\n'
      << prefix << ".fp = " << r.fp << '\n'
      << prefix << ".fn = " << r.fn << '\n'
      << prefix << ".idsw = " << r.idsw << '\n'
      << prefix << ".gt_total = " << r.gt_total << '\n';
}

int cmd_track(const std::string& det_path, const std::string& emb_path,
              const std::string& out_path, const std::string& config_path,
              const std::vector<std::string>& sets) {
  const Config cfg = load_config(config_path, sets);
  DetectionMap dets = read_detections(det_path);
  if (!emb_path.empty()) read_embeddings(emb_path, dets);
  const ResultSequence res = run_tracker(cfg.association(), dets);
  write_results(out_path, res);
  echo_config(cfg, fs::path(out_path).parent_path());
  long long boxes = 0;
  for (const auto& [f, v] : res) boxes += static_cast<long long>(v.size());
  std::printf("tracked %zu frames, %lld output boxes -> %s\n", res.size(), boxes,
              out_path.c_str());
  return 0;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed,
              const std::string& config_path, const std::vector<std::string>& sets) {
  const Config cfg = load_config(config_path, sets);
  ScenarioConfig scenario = cfg.scenario();
  scenario.seed = seed;
  CorruptionConfig corr = cfg.corruption();
  corr.seed = rng::mix(seed, 0xC0DE);

  const SyntheticTruth truth = generate_truth(scenario);
  const DetectionMap dets = corrupt(truth, corr);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_gt((dir / "gt.txt").string(), truth.gt);
  write_detections((dir / "det.txt").string(), dets);
  long long n_det = 0, with_emb = 0;
  for (const auto& [f, v] : dets)
    for (const auto& d : v) {
      ++n_det;
      if (d.embedding) ++with_emb;
    }
  if (with_emb > 0) write_embeddings((dir / "det.emb.csv").string(), dets);
  echo_config(cfg, dir);
  std::printf("wrote %d frames, %lld detections (%lld with embeddings) -> %s\n",
              scenario.num_frames, n_det, with_emb, out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& res_path,
             const std::string& out_path, const std::string& config_path,
             const std::vector<std::string>& sets, bool serial) {
  const Config cfg = load_config(config_path, sets);

  std::vector<NamedSequencePair> pairs;
  if (fs::is_directory(gt_path)) {
    if (!fs::is_directory(res_path))
      throw std::runtime_error("--res must be a directory when --gt is one");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(gt_path))
      if (e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error(gt_path + ": no .txt files");
    for (const auto& f : files) {
      const fs::path r = fs::path(res_path) / f.filename();
      if (!fs::exists(r)) throw std::runtime_error(r.string() + ": missing results file");
      pairs.push_back({f.stem().string(), read_gt(f.string()), read_results(r.string())});
    }
  } else {
    pairs.push_back({fs::path(gt_path).stem().string(), read_gt(gt_path),
                     read_results(res_path)});
  }

  const EvalSet set =
      evaluate_set(pairs, cfg.metrics(), serial ? Exec::serial : Exec::parallel);

  EvalTable table;
  for (const auto& [name, rep] : set.sequences) {
    table.names.push_back(name);
    table.rows.push_back(rep);
  }
  if (set.sequences.size() > 1) {
    table.names.push_back("combined");
    table.rows.push_back(set.combined);
  }
  print_metric_table(table);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    for (const auto& [name, rep] : set.sequences) write_metric_kv(out, name, rep);
    write_metric_kv(out, "combined", set.combined);
  }
  return 0;
}

int cmd_augment(const std::string& in_path, const std::string& out_path,
                std::uint64_t seed, const std::string& config_path,
                const std::vector<std::string>& sets, bool serial) {
  const Config cfg = load_config(config_path, sets);
  const AugmentRanges ranges = cfg.augment();
  const Exec exec = serial ? Exec::serial : Exec::parallel;

  auto describe = [](const AugmentParams& p) {
    return "contrast=" + fmt_num(p.contrast) + " brightness=" + fmt_num(p.brightness_scale) +
           " blur=" + fmt_num(p.blur_sigma) + " gamma=" + fmt_num(p.gamma) +
           " noise=" + fmt_num(p.noise_sigma) + " seed=" + std::to_string(p.seed);
  };

  if (fs::is_directory(in_path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in_path))
      if (e.path().extension() == ".ppm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error(in_path + ": no .ppm files");
    fs::create_directories(out_path);
    std::ofstream manifest(fs::path(out_path) / "params.txt");
    for (std::size_t i = 0; i < files.size(); ++i) {
      const AugmentParams p =
          sample_params(rng::mix(seed, static_cast<std::uint64_t>(i)), ranges);
      const Image degraded = enhance(read_ppm(files[i].string()), p, exec);
      write_ppm(degraded, (fs::path(out_path) / files[i].filename()).string());
      manifest << files[i].filename().string() << ' ' << describe(p) << '\n';
    }
    echo_config(cfg, out_path);
    std::printf("degraded %zu images -> %s\n", files.size(), out_path.c_str());
  } else {
    const AugmentParams p = sample_params(seed, ranges);
    write_ppm(enhance(read_ppm(in_path), p, exec), out_path);
    std::printf("%s %s\n", out_path.c_str(), describe(p).c_str());
  }
  return 0;
}

int cmd_asa(const std::string& preds_path, const std::string& pseudos_path,
            const std::string& out_path, const std::string& config_path,
            const std::vector<std::string>& sets, bool serial) {
  const Config cfg = load_config(config_path, sets);
  const double diag = std::hypot(cfg.get_double("synth.width"),
                                 cfg.get_double("synth.height"));

  std::vector<Prediction> preds;
  for (const auto& [lineno, text] : content_lines(preds_path)) {
    const auto v = parse_numbers(preds_path, lineno, text, 6);
    preds.push_back({{v[0], v[1], v[2], v[3]}, v[4], v[5]});
  }
  std::vector<PseudoBox> pseudos;
  for (const auto& [lineno, text] : content_lines(pseudos_path)) {
    const auto v = parse_numbers(pseudos_path, lineno, text, 5);
    pseudos.push_back({{v[0], v[1], v[2], v[3]}, v[4]});
  }

  const AsaWeights w = cfg.asa_weights();
  const AsaConfig acfg = cfg.asa();
  const CostMatrix cost = build_cost_matrix(preds, pseudos, w, acfg, diag,
                                            serial ? Exec::serial : Exec::parallel);
  const AsaResult result = asa_assign(cost, acfg);
  const auto violations =
      pseudo_consistency_check(preds, pseudos, result, w, acfg, diag);

  std::printf("%zu predictions, %zu pseudo-boxes: %zu positive, %zu negative, "
              "%zu ignored, %zu consistency violations\n",
              preds.size(), pseudos.size(), result.positives.size(),
              result.negatives.size(), result.ignored.size(), violations.size());
  for (const auto& [i, j] : result.positives)
    std::printf("pred %d: positive for pseudo %d (cost %s)\n", i, j,
                fixed6(cost.cost(i, j)).c_str());
  for (int i : result.negatives) std::printf("pred %d: negative\n", i);
  for (int i : result.ignored) std::printf("pred %d: ignored\n", i);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    out << "n_preds = " << preds.size() << '\n'
        << "n_pseudos = " << pseudos.size() << '\n'
        << "n_positive = " << result.positives.size() << '\n'
        << "n_negative = " << result.negatives.size() << '\n'
        << "n_ignored = " << result.ignored.size() << '\n'
        << "n_violations = " << violations.size() << '\n';
    for (const auto& [i, j] : result.positives)
      out << "positive." << i << " = " << j << '\n';
  }
  return violations.empty() ? 0 : 3;
}

int cmd_ssl_loss(const std::string& batch_path, const std::string& out_path,
                 const std::string& config_path, const std::vector<std::string>& sets) {
  const Config cfg = load_config(config_path, sets);
  const double diag = std::hypot(cfg.get_double("synth.width"),
                                 cfg.get_double("synth.height"));
  const LossWeights w = cfg.loss_weights();
  const UnlabeledWeightMode mode = cfg.unlabeled_mode();

  std::vector<LossFrame> labeled, unlabeled;
  LossFrame* cur = nullptr;
  for (const auto& [lineno, text] : content_lines(batch_path)) {
    std::istringstream ss(text);
    std::string kind;
    ss >> kind;
    std::string rest;
    std::getline(ss, rest);
    auto need_frame = [&]() -> LossFrame& {
      if (!cur)
        throw std::runtime_error(batch_path + ": line " + std::to_string(lineno) +
                                 ": '" + kind + "' before any frame line");
      return *cur;
    };
    if (kind == "frame") {
      std::istringstream rs(rest);
      std::string which;
      rs >> which;
      if (which == "labeled")
        cur = &labeled.emplace_back();
      else if (which == "unlabeled")
        cur = &unlabeled.emplace_back();
      else
        throw std::runtime_error(batch_path + ": line " + std::to_string(lineno) +
                                 ": frame must be labeled or unlabeled");
    } else if (kind == "pred") {
      const auto v = parse_numbers(batch_path, lineno, rest, 5);
      need_frame().preds.push_back({{v[1], v[2], v[3], v[4]}, v[0], 1.0});
    } else if (kind == "target") {
      const auto v = parse_numbers(batch_path, lineno, rest);
      if (v.size() != 4 && v.size() != 5)
        throw std::runtime_error(batch_path + ": line " + std::to_string(lineno) +
                                 ": target expects x y w h [confidence]");
      need_frame().targets.push_back({{v[0], v[1], v[2], v[3]},
                                      v.size() == 5 ? v[4] : 1.0});
    } else if (kind == "pos") {
      const auto v = parse_numbers(batch_path, lineno, rest, 2);
      need_frame().assignment.positives.emplace_back(static_cast<int>(v[0]),
                                                     static_cast<int>(v[1]));
    } else if (kind == "neg") {
      const auto v = parse_numbers(batch_path, lineno, rest, 1);
      need_frame().assignment.negatives.push_back(static_cast<int>(v[0]));
    } else {
      throw std::runtime_error(batch_path + ": line " + std::to_string(lineno) +
                               ": unknown record '" + kind + "'");
    }
  }
  if (labeled.empty())
    throw std::runtime_error(batch_path + ": batch needs at least one labeled frame");

  const BatchComposition batch{static_cast<int>(labeled.size()),
                               static_cast<int>(unlabeled.size())};
  const double l_l = labeled_loss(labeled, w, diag);
  const double l_u = unlabeled.empty() ? 0.0 : unlabeled_loss(unlabeled, w, diag);
  const double lambda_u = unlabeled_weight(batch, mode);
  const double total = total_loss(l_u, l_l, batch, mode);

  std::printf("labeled    (N=%d): %s\n", batch.n_labeled, fixed6(l_l).c_str());
  std::printf("unlabeled  (M=%d): %s\n", batch.m_unlabeled, fixed6(l_u).c_str());
  std::printf("lambda_u         : %s\n", fixed6(lambda_u).c_str());
  std::printf("total            : %s\n", fixed6(total).c_str());

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    out << "n_labeled = " << batch.n_labeled << '\n'
        << "m_unlabeled = " << batch.m_unlabeled << '\n'
        << "labeled_loss = " << fmt_num(l_l) << '\n'
        << "unlabeled_loss = " << fmt_num(l_u) << '\n'
        << "lambda_u = " << fmt_num(lambda_u) << '\n'
        << "total = " << fmt_num(total) << '\n';
  }
  return 0;
}

int cmd_anu_sim(const std::string& trace_path, const std::string& out_path,
                const std::string& config_path, const std::vector<std::string>& sets) {
  const Config cfg = load_config(config_path, sets);
  const double keep = cfg.anu_keep_rate();

  std::vector<double> target, init;
  std::vector<ParamVector> students;
  for (const auto& [lineno, text] : content_lines(trace_path)) {
    std::istringstream ss(text);
    std::string kind;
    ss >> kind;
    std::string rest;
    std::getline(ss, rest);
    const auto v = parse_numbers(trace_path, lineno, rest);
    if (v.empty())
      throw std::runtime_error(trace_path + ": line " + std::to_string(lineno) +
                               ": expected values after '" + kind + "'");
    if (kind == "target") {
      target = v;
    } else if (kind == "init") {
      init = v;
    } else if (kind == "student") {
      ParamVector p(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
      students.push_back(std::move(p));
    } else {
      throw std::runtime_error(trace_path + ": line " + std::to_string(lineno) +
                               ": unknown record '" + kind + "'");
    }
  }
  if (target.empty() || init.empty() || students.empty())
    throw std::runtime_error(trace_path + ": need target, init and at least one student");
  if (target.size() != init.size())
    throw std::runtime_error(trace_path + ": target and init dimensions differ");
  for (const auto& s : students)
    if (static_cast<std::size_t>(s.size()) != init.size())
      throw std::runtime_error(trace_path + ": student dimension differs from init");

  ParamVector tv(target.size()), iv(init.size());
  for (std::size_t i = 0; i < target.size(); ++i) tv[static_cast<int>(i)] = target[i];
  for (std::size_t i = 0; i < init.size(); ++i) iv[static_cast<int>(i)] = init[i];
  const EvalFn eval = [tv](const ParamVector& p) { return -(p - tv).squaredNorm(); };

  const AnuState state = anu_run(iv, students, eval, keep);

  auto action_name = [](AnuAction a) {
    switch (a) {
      case AnuAction::teacher_improved: return "teacher_improved";
      case AnuAction::student_promoted: return "student_promoted";
      case AnuAction::both: return "both";
      default: return "none";
    }
  };
  std::printf("%5s %14s %14s %14s  %s\n", "epoch", "teacher_eval", "student_eval",
              "best_eval", "action");
  for (const auto& rec : state.history)
    std::printf("%5d %14.6f %14.6f %14.6f  %s\n", rec.epoch, rec.teacher_eval,
                rec.student_eval, rec.best_eval, action_name(rec.action));
  std::string best = "best_params =";
  for (int i = 0; i < state.best_params.size(); ++i)
    best += " " + fmt_num(state.best_params[i]);
  std::printf("%s\nbest_eval = %s\n", best.c_str(), fmt_num(state.best_eval).c_str());

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
    for (const auto& rec : state.history)
      out << "epoch." << rec.epoch << " = " << fmt_num(rec.teacher_eval) << ' '
          << fmt_num(rec.student_eval) << ' ' << fmt_num(rec.best_eval) << ' '
          << action_name(rec.action) << '\n';
    out << "best_eval = " << fmt_num(state.best_eval) << '\n';
  }
  return 0;
}

struct AblateRow {
  std::string label;
  bool appearance = true;
  SimilarityMode mode = SimilarityMode::split_cosine;
  bool second_stage = true;
};

int cmd_ablate(const std::string& out_dir, std::uint64_t seed, int n_seeds,
               double severity, int objects, int crossings, int frames, bool bounce,
               const std::string& config_path, const std::vector<std::string>& sets) {
  Config cfg = load_config(config_path, sets);
  cfg.set("corrupt.severity", fmt_num(severity));
  cfg.set("synth.num_objects", std::to_string(objects));
  cfg.set("synth.crossings", std::to_string(crossings));
  cfg.set("synth.num_frames", std::to_string(frames));
  cfg.set("synth.bounce_crossings", bounce ? "true" : "false");

  // One benchmark instance per seed, shared by every configuration row.
  std::vector<SyntheticTruth> truths;
  std::vector<DetectionMap> det_sets;
  for (int i = 0; i < n_seeds; ++i) {
    ScenarioConfig scenario = cfg.scenario();
    scenario.seed = seed + static_cast<std::uint64_t>(i);
    CorruptionConfig corr = cfg.corruption();
    corr.seed = rng::mix(scenario.seed, 0xC0DE);
    truths.push_back(generate_truth(scenario));
    det_sets.push_back(corrupt(truths.back(), corr));
  }

  const AssociationConfig base = cfg.association();
  std::vector<AblateRow> rows;
  for (bool app : {true, false})
    for (SimilarityMode mode : {SimilarityMode::split_cosine, SimilarityMode::matrix_product})
      for (bool ss : {true, false}) {
        AblateRow row;
        row.appearance = app;
        row.mode = mode;
        row.second_stage = ss;
        row.label = std::string("app=") + (app ? "on " : "off") + " sim=" +
                    (mode == SimilarityMode::split_cosine ? "split  " : "product") +
                    " stage2=" + (ss ? "on " : "off");
        rows.push_back(row);
      }

  EvalTable table;
  for (const auto& row : rows) {
    AssociationConfig acfg = base;
    acfg.appearance_weight = row.appearance ? base.appearance_weight : 0.0;
    acfg.similarity_mode = row.mode;
    acfg.second_stage_enabled = row.second_stage;
    std::vector<NamedSequencePair> pairs;
    for (int i = 0; i < n_seeds; ++i)
      pairs.push_back({"seed" + std::to_string(i), truths[i].gt,
                       run_tracker(acfg, det_sets[i])});
    const EvalSet set = evaluate_set(pairs, cfg.metrics(), Exec::serial);
    table.names.push_back(row.label);
    table.rows.push_back(set.combined);
  }
  print_metric_table(table);

  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "ablate.kv");
  if (!out) throw std::runtime_error(out_dir + "/ablate.kv: cannot open for writing");
  out << "seeds = " << n_seeds << '\n' << "base_seed = " << seed << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string prefix = "row" + std::to_string(i);
    out << prefix << ".label = " << table.names[i] << '\n';
    write_metric_kv(out, prefix, table.rows[i]);
  }
  echo_config(cfg, out_dir);
  std::printf("wrote %s/ablate.kv\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CRTrack: multi-object tracking engine and benchmark toolkit"};
  app.require_subcommand(1);

  std::string det_path, emb_path, out_path, config_path, gt_path, res_path, in_path;
  std::string preds_path, pseudos_path, batch_path, trace_path, out_dir;
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  bool serial = false;
  int n_seeds = 10, objects = 6, crossings = 2, frames = 100;
  double severity = 0.6;
  bool no_bounce = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key = value lines)");
    sub->add_option("--set", sets, "override a config key, e.g. --set assoc.max_age=20")
        ->take_all();
  };

  CLI::App* track = app.add_subcommand("track", "associate detections into tracks");
  track->add_option("--det", det_path, "MOT detection file")->required();
  track->add_option("--emb", emb_path, "embedding sidecar (.emb.csv)");
  track->add_option("--out", out_path, "results file to write")->required();
  track->add_option("--seed", seed, "accepted for interface uniformity; tracking is deterministic");
  add_common(track);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark sequence");
  synth->add_option("--out-dir", out_dir, "directory for gt.txt/det.txt/det.emb.csv")
      ->required();
  synth->add_option("--seed", seed, "scenario seed");
  add_common(synth);

  CLI::App* eval = app.add_subcommand("eval", "score results against ground truth");
  eval->add_option("--gt", gt_path, "gt file, or directory of gt .txt files")->required();
  eval->add_option("--res", res_path, "results file, or directory matching --gt")->required();
  eval->add_option("--out", out_path, "also write metrics as key = value");
  eval->add_flag("--serial", serial, "evaluate sequences one at a time");
  add_common(eval);

  CLI::App* augment = app.add_subcommand("augment", "apply the low-light degradation chain");
  augment->add_option("--in", in_path, "PPM image or directory of .ppm files")->required();
  augment->add_option("--out", out_path, "output image or directory")->required();
  augment->add_option("--seed", seed, "parameter sampling seed");
  augment->add_flag("--serial", serial, "disable the parallel pixel kernels");
  add_common(augment);

  CLI::App* asa = app.add_subcommand("asa", "assign predictions to pseudo-labels");
  asa->add_option("--preds", preds_path, "predictions: x y w h class_prob objectness per line")
      ->required();
  asa->add_option("--pseudos", pseudos_path, "pseudo-boxes: x y w h confidence per line")
      ->required();
  asa->add_option("--out", out_path, "also write the assignment as key = value");
  asa->add_flag("--serial", serial, "serial cost matrix");
  add_common(asa);

  CLI::App* ssl = app.add_subcommand("ssl-loss", "evaluate the semi-supervised batch loss");
  ssl->add_option("--batch", batch_path, "batch file (frame/pred/target/pos/neg records)")
      ->required();
  ssl->add_option("--out", out_path, "also write the breakdown as key = value");
  add_common(ssl);

  CLI::App* anu = app.add_subcommand("anu-sim", "replay the teacher-student update rule");
  anu->add_option("--trace", trace_path, "trace file (target/init/student records)")
      ->required();
  anu->add_option("--out", out_path, "also write the history as key = value");
  add_common(anu);

  CLI::App* ablate = app.add_subcommand("ablate", "metric grid over the feature flags");
  ablate->add_option("--out-dir", out_dir, "directory for ablate.kv")->required();
  ablate->add_option("--seed", seed, "first scenario seed");
  ablate->add_option("--seeds", n_seeds, "number of seeds to average over")
      ->check(CLI::PositiveNumber);
  ablate->add_option("--severity", severity, "corruption severity")
      ->check(CLI::Range(0.0, 1.0));
  ablate->add_option("--objects", objects, "objects per scenario")->check(CLI::PositiveNumber);
  ablate->add_option("--crossings", crossings, "staged crossing pairs");
  ablate->add_option("--frames", frames, "frames per scenario")->check(CLI::PositiveNumber);
  ablate->add_flag("--no-bounce", no_bounce, "crossings pass through instead of bouncing");
  add_common(ablate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (track->parsed())
      return cmd_track(det_path, emb_path, out_path, config_path, sets);
    if (synth->parsed()) return cmd_synth(out_dir, seed, config_path, sets);
    if (eval->parsed())
      return cmd_eval(gt_path, res_path, out_path, config_path, sets, serial);
    if (augment->parsed())
      return cmd_augment(in_path, out_path, seed, config_path, sets, serial);
    if (asa->parsed())
      return cmd_asa(preds_path, pseudos_path, out_path, config_path, sets, serial);
    if (ssl->parsed()) return cmd_ssl_loss(batch_path, out_path, config_path, sets);
    if (anu->parsed()) return cmd_anu_sim(trace_path, out_path, config_path, sets);
    if (ablate->parsed())
      return cmd_ablate(out_dir, seed, n_seeds, severity, objects, crossings, frames,
                        !no_bounce, config_path, sets);
  } catch (const std::exception& e) {
    std::cerr << "crtrack: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
