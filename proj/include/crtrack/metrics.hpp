#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crtrack/core.hpp"
#include "crtrack/parallel.hpp"

namespace crtrack {

struct GtBox {
  int id = 0;
  BoundingBox box;
  int cls = 1;
  double visibility = 1.0;
};

struct ResBox {
  int id = 0;
  BoundingBox box;
  double score = 1.0;
};

using GtSequence = std::map<int, std::vector<GtBox>>;          // frame -> boxes
using ResultSequence = std::map<int, std::vector<ResBox>>;

struct MetricsConfig {
  double iou_threshold = 0.5;
  double min_visibility = 0.1;
  int pedestrian_class = 1;
};

// Drops ground truth below the visibility floor or outside the scored class.
GtSequence filter_gt(const GtSequence& gt, const MetricsConfig& cfg);

struct ClearResult {
  double mota = 0.0;
  long long tp = 0, fp = 0, fn = 0, idsw = 0, gt_total = 0;
};

// CLEAR accounting with carried-over matches: an existing correspondence is
// kept while it still overlaps, the remainder is matched per frame at
// minimum total (1 - IoU). Identity memory survives gaps, so a switch is
// counted only between consecutive matched occurrences of a gt identity.
ClearResult clear_metrics(const GtSequence& gt, const ResultSequence& res,
                          double iou_threshold = 0.5);

struct Idf1Result {
  double idf1 = 0.0;
  long long idtp = 0, gt_total = 0, res_total = 0;
};

// Global one-to-one identity matching maximising per-pair frame overlap.
Idf1Result idf1(const GtSequence& gt, const ResultSequence& res,
                double iou_threshold = 0.5);

inline constexpr int kHotaAlphaCount = 19;  // 0.05, 0.10, ..., 0.95

// Per-alpha accumulators; summable across sequences.
struct HotaAccum {
  std::array<double, kHotaAlphaCount> tp{}, fn{}, fp{}, ass_sum{};
  HotaAccum& operator+=(const HotaAccum& o);
};

struct HotaResult {
  double hota = 0.0, deta = 0.0, assa = 0.0;
};

HotaAccum hota_accumulate(const GtSequence& gt, const ResultSequence& res);
HotaResult hota_finalize(const HotaAccum& acc);
HotaResult hota(const GtSequence& gt, const ResultSequence& res);

// Scored detections pooled per IoU threshold 0.50:0.05:0.95; summable.
struct ApAccum {
  std::array<std::vector<std::pair<double, bool>>, 10> scored;  // (score, tp)
  long long gt_total = 0;
  ApAccum& operator+=(const ApAccum& o);
};

struct ApResult {
  double ap50 = 0.0, ap50_95 = 0.0, ar = 0.0;
};

ApAccum ap_accumulate(const GtSequence& gt, const ResultSequence& res);
// Average precision is the exact area under the interpolated precision
// envelope; recall is the best recall reached per threshold.
ApResult ap_finalize(const ApAccum& acc);
ApResult detection_ap(const GtSequence& gt, const ResultSequence& res);

struct MetricReport {
  double deta = 0.0, mota = 0.0, hota = 0.0, idf1 = 0.0, assa = 0.0;
  long long tp = 0, fp = 0, fn = 0, idsw = 0, gt_total = 0;
  double ap50 = 0.0, ap50_95 = 0.0, ar = 0.0;
};

MetricReport evaluate_sequence(const GtSequence& gt, const ResultSequence& res,
                               const MetricsConfig& cfg = {});

struct NamedSequencePair {
  std::string name;
  GtSequence gt;
  ResultSequence res;
};

struct EvalSet {
  std::vector<std::pair<std::string, MetricReport>> sequences;
  MetricReport combined;
};

// Per-sequence reports plus a combined report micro-averaged over summed
// accumulators. Sequences are independent and evaluated in parallel.
EvalSet evaluate_set(const std::vector<NamedSequencePair>& pairs,
                     const MetricsConfig& cfg = {}, Exec exec = Exec::parallel);

}  // namespace crtrack
