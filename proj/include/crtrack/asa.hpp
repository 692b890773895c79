#pragma once

#include <utility>
#include <vector>

#include "crtrack/core.hpp"
#include "crtrack/matrix.hpp"
#include "crtrack/parallel.hpp"

namespace crtrack {

struct AsaWeights {
  double lambda_cls = 1.0;
  double lambda_reg = 1.0;
  double lambda_iou = 3.0;
  double lambda_dis = 2.0;
};

struct AsaConfig {
  int k = 10;
  double negative_cost_threshold = 6.0;
  double candidate_radius_scale = 2.5;
  bool soft_targets = false;
};

// Assignment of predictions against one frame's pseudo-labels. positives are
// (prediction, pseudo) pairs; negatives and ignored hold prediction indices.
struct AsaResult {
  std::vector<std::pair<int, int>> positives;
  std::vector<int> negatives;
  std::vector<int> ignored;
};

// Combined per-pair cost: classification + box regression + IoU + a
// center-distance prior, all weighted. Scores are clamped away from zero so
// the log loss stays finite.
double pair_cost(const Prediction& pred, const PseudoBox& pseudo, const AsaWeights& w,
                 double image_diag, bool soft_target = false);

// Cost matrix with non-candidate pairs forbidden. A prediction is candidate
// to a pseudo-label when its center lies inside the pseudo box or within
// candidate_radius_scale * sqrt(area) of its center.
CostMatrix build_cost_matrix(const std::vector<Prediction>& preds,
                             const std::vector<PseudoBox>& pseudos, const AsaWeights& w,
                             const AsaConfig& cfg, double image_diag,
                             Exec exec = Exec::parallel);

// Per pseudo-label the k cheapest candidates are claimed; multiply-claimed
// predictions resolve to their cheapest pseudo-label; claimed pairs above the
// negative threshold are dropped. Non-candidates and candidates whose best
// cost exceeds the threshold become negatives, the rest are ignored.
AsaResult asa_assign(const CostMatrix& cost, const AsaConfig& cfg);

struct ConsistencyViolation {
  int pred = 0;
  int pseudo = 0;
  double cost = 0.0;
  double rank_cost = 0.0;  // k-th smallest candidate cost of that pseudo
};

// Verifies every positive pair sits within rank k of its pseudo-label's
// candidate costs; returns the violations found.
std::vector<ConsistencyViolation> pseudo_consistency_check(
    const std::vector<Prediction>& preds, const std::vector<PseudoBox>& pseudos,
    const AsaResult& result, const AsaWeights& w, const AsaConfig& cfg,
    double image_diag);

}  // namespace crtrack
