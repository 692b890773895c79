#include "crtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "crtrack/assignment.hpp"
#include "crtrack/kernels.hpp"

namespace crtrack {

namespace {

constexpr double kAlphaEps = 1e-12;

template <typename BoxT>
void validate_sequence(const std::map<int, std::vector<BoxT>>& seq, const char* who) {
  for (const auto& [frame, boxes] : seq) {
    std::set<int> ids;
    for (const auto& b : boxes) {
      if (!b.box.valid())
        throw std::invalid_argument(std::string(who) + ": invalid box");
      if (!ids.insert(b.id).second)
        throw std::invalid_argument(std::string(who) + ": duplicate id in frame " +
                                    std::to_string(frame));
    }
  }
}

long long box_count(const auto& seq) {
  long long n = 0;
  for (const auto& [frame, boxes] : seq) n += static_cast<long long>(boxes.size());
  return n;
}

std::vector<int> frame_union(const GtSequence& gt, const ResultSequence& res) {
  std::set<int> frames;
  for (const auto& [f, _] : gt) frames.insert(f);
  for (const auto& [f, _] : res) frames.insert(f);
  return {frames.begin(), frames.end()};
}

}  // namespace

GtSequence filter_gt(const GtSequence& gt, const MetricsConfig& cfg) {
  GtSequence out;
  for (const auto& [frame, boxes] : gt) {
    std::vector<GtBox> kept;
    for (const auto& b : boxes)
      if (b.cls == cfg.pedestrian_class && b.visibility >= cfg.min_visibility)
        kept.push_back(b);
    if (!kept.empty()) out[frame] = std::move(kept);
  }
  return out;
}

ClearResult clear_metrics(const GtSequence& gt, const ResultSequence& res,
                          double iou_threshold) {
  validate_sequence(gt, "clear_metrics gt");
  validate_sequence(res, "clear_metrics res");
  ClearResult out;
  out.gt_total = box_count(gt);
  if (out.gt_total == 0)
    throw std::invalid_argument("clear_metrics: empty ground truth");

  std::map<int, int> last_match;  // gt id -> res id, survives gaps
  static const std::vector<GtBox> no_gt;
  static const std::vector<ResBox> no_res;

  for (int frame : frame_union(gt, res)) {
    const auto git = gt.find(frame);
    const auto rit = res.find(frame);
    const auto& gboxes = git == gt.end() ? no_gt : git->second;
    const auto& rboxes = rit == res.end() ? no_res : rit->second;
    const int ng = static_cast<int>(gboxes.size());
    const int nr = static_cast<int>(rboxes.size());

    std::vector<BoundingBox> gb, rb;
    for (const auto& g : gboxes) gb.push_back(g.box);
    for (const auto& r : rboxes) rb.push_back(r.box);
    const Matrix iou_m = kernels::iou_matrix(gb, rb, Exec::serial);

    std::map<int, int> res_index;  // res id -> column
    for (int j = 0; j < nr; ++j) res_index[rboxes[j].id] = j;

    std::vector<char> g_used(ng, false), r_used(nr, false);
    std::vector<std::pair<int, int>> frame_matches;

    // Keep correspondences that still hold from the identity memory.
    for (int i = 0; i < ng; ++i) {
      const auto prev = last_match.find(gboxes[i].id);
      if (prev == last_match.end()) continue;
      const auto col = res_index.find(prev->second);
      if (col == res_index.end() || r_used[col->second]) continue;
      if (iou_m.at(i, col->second) >= iou_threshold) {
        frame_matches.emplace_back(i, col->second);
        g_used[i] = true;
        r_used[col->second] = true;
      }
    }

    // Optimal matching on the rest.
    std::vector<int> g_free, r_free;
    for (int i = 0; i < ng; ++i)
      if (!g_used[i]) g_free.push_back(i);
    for (int j = 0; j < nr; ++j)
      if (!r_used[j]) r_free.push_back(j);
    if (!g_free.empty() && !r_free.empty()) {
      CostMatrix cost(static_cast<int>(g_free.size()), static_cast<int>(r_free.size()));
      for (std::size_t a = 0; a < g_free.size(); ++a)
        for (std::size_t b = 0; b < r_free.size(); ++b) {
          const double v = iou_m.at(g_free[a], r_free[b]);
          cost.set_cost(static_cast<int>(a), static_cast<int>(b), 1.0 - v);
          if (v < iou_threshold) cost.forbid(static_cast<int>(a), static_cast<int>(b));
        }
      for (const auto& [a, b] : solve_assignment(cost).matches)
        frame_matches.emplace_back(g_free[a], r_free[b]);
    }

    out.tp += static_cast<long long>(frame_matches.size());
    out.fn += ng - static_cast<long long>(frame_matches.size());
    out.fp += nr - static_cast<long long>(frame_matches.size());
    for (const auto& [i, j] : frame_matches) {
      const int gid = gboxes[i].id;
      const int rid = rboxes[j].id;
      const auto prev = last_match.find(gid);
      if (prev != last_match.end() && prev->second != rid) out.idsw += 1;
      last_match[gid] = rid;
    }
  }

  out.mota = 1.0 - static_cast<double>(out.fp + out.fn + out.idsw) /
                       static_cast<double>(out.gt_total);
  return out;
}

Idf1Result idf1(const GtSequence& gt, const ResultSequence& res, double iou_threshold) {
  validate_sequence(gt, "idf1 gt");
  validate_sequence(res, "idf1 res");
  Idf1Result out;
  out.gt_total = box_count(gt);
  out.res_total = box_count(res);
  if (out.gt_total == 0) throw std::invalid_argument("idf1: empty ground truth");

  std::map<int, int> gidx, ridx;
  for (const auto& [f, boxes] : gt)
    for (const auto& b : boxes)
      gidx.emplace(b.id, static_cast<int>(gidx.size()));
  for (const auto& [f, boxes] : res)
    for (const auto& b : boxes)
      ridx.emplace(b.id, static_cast<int>(ridx.size()));
  const int ng = static_cast<int>(gidx.size());
  const int nr = static_cast<int>(ridx.size());
  if (nr == 0) return out;

  // Frames where the pair overlaps at or above the threshold.
  Matrix overlap(ng, nr, 0.0);
  for (const auto& [frame, gboxes] : gt) {
    const auto rit = res.find(frame);
    if (rit == res.end()) continue;
    for (const auto& g : gboxes)
      for (const auto& r : rit->second)
        if (iou(g.box, r.box) >= iou_threshold)
          overlap.at(gidx[g.id], ridx[r.id]) += 1.0;
  }

  CostMatrix cost(ng, nr);
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < nr; ++j) cost.set_cost(i, j, -overlap.at(i, j));
  double best = 0.0;
  for (const auto& [i, j] : solve_assignment(cost).matches) best += overlap.at(i, j);

  out.idtp = static_cast<long long>(std::llround(best));
  out.idf1 = 2.0 * static_cast<double>(out.idtp) /
             static_cast<double>(out.gt_total + out.res_total);
  return out;
}

HotaAccum& HotaAccum::operator+=(const HotaAccum& o) {
  for (int a = 0; a < kHotaAlphaCount; ++a) {
    tp[a] += o.tp[a];
    fn[a] += o.fn[a];
    fp[a] += o.fp[a];
    ass_sum[a] += o.ass_sum[a];
  }
  return *this;
}

HotaAccum hota_accumulate(const GtSequence& gt, const ResultSequence& res) {
  validate_sequence(gt, "hota gt");
  validate_sequence(res, "hota res");
  if (box_count(gt) == 0) throw std::invalid_argument("hota: empty ground truth");

  std::map<int, int> gidx, ridx;
  std::map<int, double> t_g, t_r;  // presence counts per identity
  for (const auto& [f, boxes] : gt)
    for (const auto& b : boxes) {
      gidx.emplace(b.id, static_cast<int>(gidx.size()));
      t_g[b.id] += 1.0;
    }
  for (const auto& [f, boxes] : res)
    for (const auto& b : boxes) {
      ridx.emplace(b.id, static_cast<int>(ridx.size()));
      t_r[b.id] += 1.0;
    }
  const int ng = static_cast<int>(gidx.size());
  const int nr = static_cast<int>(ridx.size());
  const double gt_total = static_cast<double>(box_count(gt));
  const double res_total = static_cast<double>(box_count(res));

  struct FrameData {
    std::vector<int> gids, rids;  // identity indices
    Matrix iou_m;
  };
  std::vector<FrameData> frames;
  for (int frame : frame_union(gt, res)) {
    FrameData fd;
    std::vector<BoundingBox> gb, rb;
    if (auto it = gt.find(frame); it != gt.end())
      for (const auto& g : it->second) {
        fd.gids.push_back(gidx[g.id]);
        gb.push_back(g.box);
      }
    if (auto it = res.find(frame); it != res.end())
      for (const auto& r : it->second) {
        fd.rids.push_back(ridx[r.id]);
        rb.push_back(r.box);
      }
    fd.iou_m = kernels::iou_matrix(gb, rb, Exec::serial);
    frames.push_back(std::move(fd));
  }

  std::vector<double> tg(ng), tr(nr);
  for (const auto& [id, idx] : gidx) tg[idx] = t_g[id];
  for (const auto& [id, idx] : ridx) tr[idx] = t_r[id];

  HotaAccum acc;
  for (int a = 0; a < kHotaAlphaCount; ++a) {
    const double alpha = 0.05 * (a + 1);

    // First pass: soft potential overlap per identity pair, eligible cells
    // only, normalised per frame like a Jaccard share.
    Matrix pot(ng, nr, 0.0);
    for (const auto& fd : frames) {
      const int fg = static_cast<int>(fd.gids.size());
      const int fr = static_cast<int>(fd.rids.size());
      std::vector<double> rowsum(fg, 0.0), colsum(fr, 0.0);
      for (int i = 0; i < fg; ++i)
        for (int j = 0; j < fr; ++j)
          if (fd.iou_m.at(i, j) >= alpha - kAlphaEps) {
            rowsum[i] += fd.iou_m.at(i, j);
            colsum[j] += fd.iou_m.at(i, j);
          }
      for (int i = 0; i < fg; ++i)
        for (int j = 0; j < fr; ++j) {
          const double s = fd.iou_m.at(i, j);
          if (s < alpha - kAlphaEps) continue;
          const double denom = rowsum[i] + colsum[j] - s;
          if (denom > kAlphaEps)
            pot.at(fd.gids[i], fd.rids[j]) += s / denom;
        }
    }
    Matrix align(ng, nr, 0.0);
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < nr; ++j) {
        const double denom = tg[i] + tr[j] - pot.at(i, j);
        if (denom > kAlphaEps) align.at(i, j) = pot.at(i, j) / denom;
      }

    // Second pass: per-frame matching, maximum cardinality first, then the
    // alignment-weighted overlap.
    Matrix match_count(ng, nr, 0.0);
    double tp = 0.0;
    for (const auto& fd : frames) {
      const int fg = static_cast<int>(fd.gids.size());
      const int fr = static_cast<int>(fd.rids.size());
      if (fg == 0 || fr == 0) continue;
      CostMatrix cost(fg, fr);
      for (int i = 0; i < fg; ++i)
        for (int j = 0; j < fr; ++j) {
          const double s = fd.iou_m.at(i, j);
          if (s < alpha - kAlphaEps) {
            cost.forbid(i, j);
            continue;
          }
          cost.set_cost(i, j, -(align.at(fd.gids[i], fd.rids[j]) * s));
        }
      for (const auto& [i, j] : solve_assignment(cost).matches) {
        match_count.at(fd.gids[i], fd.rids[j]) += 1.0;
        tp += 1.0;
      }
    }

    double ass = 0.0;
    for (int i = 0; i < ng; ++i)
      for (int j = 0; j < nr; ++j) {
        const double n = match_count.at(i, j);
        if (n > 0.0) ass += n * (n / (tg[i] + tr[j] - n));
      }
    acc.tp[a] = tp;
    acc.fn[a] = gt_total - tp;
    acc.fp[a] = res_total - tp;
    acc.ass_sum[a] = ass;
  }
  return acc;
}

HotaResult hota_finalize(const HotaAccum& acc) {
  HotaResult out;
  for (int a = 0; a < kHotaAlphaCount; ++a) {
    const double denom = acc.tp[a] + acc.fn[a] + acc.fp[a];
    const double deta = denom > 0.0 ? acc.tp[a] / denom : 0.0;
    const double assa = acc.tp[a] > 0.0 ? acc.ass_sum[a] / acc.tp[a] : 0.0;
    out.deta += deta;
    out.assa += assa;
    out.hota += std::sqrt(deta * assa);
  }
  out.deta /= kHotaAlphaCount;
  out.assa /= kHotaAlphaCount;
  out.hota /= kHotaAlphaCount;
  return out;
}

HotaResult hota(const GtSequence& gt, const ResultSequence& res) {
  return hota_finalize(hota_accumulate(gt, res));
}

ApAccum& ApAccum::operator+=(const ApAccum& o) {
  for (std::size_t t = 0; t < scored.size(); ++t)
    scored[t].insert(scored[t].end(), o.scored[t].begin(), o.scored[t].end());
  gt_total += o.gt_total;
  return *this;
}

ApAccum ap_accumulate(const GtSequence& gt, const ResultSequence& res) {
  validate_sequence(gt, "detection_ap gt");
  validate_sequence(res, "detection_ap res");
  ApAccum acc;
  acc.gt_total = box_count(gt);
  if (acc.gt_total == 0) throw std::invalid_argument("detection_ap: empty ground truth");

  struct Pred {
    double score;
    int frame;
    BoundingBox box;
  };
  std::vector<Pred> preds;
  for (const auto& [frame, boxes] : res)
    for (const auto& b : boxes) preds.push_back({b.score, frame, b.box});
  // Score ties break on frame and geometry so within-frame listing order
  // cannot leak into the greedy matching.
  std::sort(preds.begin(), preds.end(), [](const Pred& a, const Pred& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return std::tie(a.box.x_left, a.box.y_top, a.box.width, a.box.height) <
           std::tie(b.box.x_left, b.box.y_top, b.box.width, b.box.height);
  });

  static const std::vector<GtBox> no_gt;
  for (int t = 0; t < 10; ++t) {
    const double thr = 0.5 + 0.05 * t;
    std::map<int, std::vector<char>> used;
    auto& scored = acc.scored[t];
    scored.reserve(preds.size());
    for (const auto& p : preds) {
      const auto git = gt.find(p.frame);
      const auto& gboxes = git == gt.end() ? no_gt : git->second;
      auto& u = used[p.frame];
      u.resize(gboxes.size(), false);
      const BoundingBox& pb = p.box;
      int best = -1;
      double best_iou = 0.0;
      for (int i = 0; i < static_cast<int>(gboxes.size()); ++i) {
        if (u[i]) continue;
        const double v = iou(pb, gboxes[i].box);
        if (v >= thr && v > best_iou) {
          best_iou = v;
          best = i;
        }
      }
      if (best >= 0) u[best] = true;
      scored.emplace_back(p.score, best >= 0);
    }
  }
  return acc;
}

ApResult ap_finalize(const ApAccum& acc) {
  if (acc.gt_total == 0) throw std::invalid_argument("ap_finalize: no ground truth");
  ApResult out;
  double ap_sum = 0.0, ar_sum = 0.0;
  for (int t = 0; t < 10; ++t) {
    std::vector<std::pair<double, bool>> scored = acc.scored[t];
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> precision, recall;
    long long tp = 0, fp = 0;
    for (const auto& [score, is_tp] : scored) {
      if (is_tp)
        ++tp;
      else
        ++fp;
      precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
      recall.push_back(static_cast<double>(tp) / static_cast<double>(acc.gt_total));
    }
    double ap = 0.0;
    if (!precision.empty()) {
      std::vector<double> envelope(precision.size());
      double run = 0.0;
      for (int i = static_cast<int>(precision.size()) - 1; i >= 0; --i) {
        run = std::max(run, precision[i]);
        envelope[i] = run;
      }
      double prev_recall = 0.0;
      for (std::size_t i = 0; i < recall.size(); ++i) {
        ap += (recall[i] - prev_recall) * envelope[i];
        prev_recall = recall[i];
      }
    }
    const double max_recall = recall.empty() ? 0.0 : recall.back();
    if (t == 0) out.ap50 = ap;
    ap_sum += ap;
    ar_sum += max_recall;
  }
  out.ap50_95 = ap_sum / 10.0;
  out.ar = ar_sum / 10.0;
  return out;
}

ApResult detection_ap(const GtSequence& gt, const ResultSequence& res) {
  return ap_finalize(ap_accumulate(gt, res));
}

MetricReport evaluate_sequence(const GtSequence& gt, const ResultSequence& res,
                               const MetricsConfig& cfg) {
  const GtSequence filtered = filter_gt(gt, cfg);
  MetricReport r;
  const ClearResult c = clear_metrics(filtered, res, cfg.iou_threshold);
  r.mota = c.mota;
  r.tp = c.tp;
  r.fp = c.fp;
  r.fn = c.fn;
  r.idsw = c.idsw;
  r.gt_total = c.gt_total;
  const Idf1Result idr = idf1(filtered, res, cfg.iou_threshold);
  r.idf1 = idr.idf1;
  const HotaResult h = hota(filtered, res);
  r.hota = h.hota;
  r.deta = h.deta;
  r.assa = h.assa;
  const ApResult ap = detection_ap(filtered, res);
  r.ap50 = ap.ap50;
  r.ap50_95 = ap.ap50_95;
  r.ar = ap.ar;
  return r;
}

EvalSet evaluate_set(const std::vector<NamedSequencePair>& pairs,
                     const MetricsConfig& cfg, Exec exec) {
  struct SeqAccum {
    ClearResult clear;
    Idf1Result id;
    HotaAccum hota;
    ApAccum ap;
  };
  const int n = static_cast<int>(pairs.size());
  std::vector<SeqAccum> accums(n);
  std::vector<std::string> errors(n);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int i = 0; i < n; ++i) {
    try {
      const GtSequence filtered = filter_gt(pairs[i].gt, cfg);
      accums[i].clear = clear_metrics(filtered, pairs[i].res, cfg.iou_threshold);
      accums[i].id = idf1(filtered, pairs[i].res, cfg.iou_threshold);
      accums[i].hota = hota_accumulate(filtered, pairs[i].res);
      accums[i].ap = ap_accumulate(filtered, pairs[i].res);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw std::invalid_argument(pairs[i].name + ": " + errors[i]);

  EvalSet out;
  ClearResult ctot;
  Idf1Result itot;
  HotaAccum htot;
  ApAccum atot;
  for (int i = 0; i < n; ++i) {
    const auto& a = accums[i];
    MetricReport r;
    r.mota = a.clear.mota;
    r.tp = a.clear.tp;
    r.fp = a.clear.fp;
    r.fn = a.clear.fn;
    r.idsw = a.clear.idsw;
    r.gt_total = a.clear.gt_total;
    r.idf1 = a.id.idf1;
    const HotaResult h = hota_finalize(a.hota);
    r.hota = h.hota;
    r.deta = h.deta;
    r.assa = h.assa;
    const ApResult ap = ap_finalize(a.ap);
    r.ap50 = ap.ap50;
    r.ap50_95 = ap.ap50_95;
    r.ar = ap.ar;
    out.sequences.emplace_back(pairs[i].name, r);

    ctot.tp += a.clear.tp;
    ctot.fp += a.clear.fp;
    ctot.fn += a.clear.fn;
    ctot.idsw += a.clear.idsw;
    ctot.gt_total += a.clear.gt_total;
    itot.idtp += a.id.idtp;
    itot.gt_total += a.id.gt_total;
    itot.res_total += a.id.res_total;
    htot += a.hota;
    atot += a.ap;
  }

  if (ctot.gt_total > 0) {
    out.combined.mota = 1.0 - static_cast<double>(ctot.fp + ctot.fn + ctot.idsw) /
                                  static_cast<double>(ctot.gt_total);
    out.combined.tp = ctot.tp;
    out.combined.fp = ctot.fp;
    out.combined.fn = ctot.fn;
    out.combined.idsw = ctot.idsw;
    out.combined.gt_total = ctot.gt_total;
    out.combined.idf1 = 2.0 * static_cast<double>(itot.idtp) /
                        static_cast<double>(itot.gt_total + itot.res_total);
    const HotaResult h = hota_finalize(htot);
    out.combined.hota = h.hota;
    out.combined.deta = h.deta;
    out.combined.assa = h.assa;
    const ApResult ap = ap_finalize(atot);
    out.combined.ap50 = ap.ap50;
    out.combined.ap50_95 = ap.ap50_95;
    out.combined.ar = ap.ar;
  }
  return out;
}

}  // namespace crtrack
