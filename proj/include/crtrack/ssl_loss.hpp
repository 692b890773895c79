#pragma once

#include <vector>

#include "crtrack/asa.hpp"
#include "crtrack/core.hpp"

namespace crtrack {

struct LossWeights {
  double lambda_cls = 1.0;
  double lambda_reg = 1.0;
  double lambda_iou = 3.0;
};

struct BatchComposition {
  int n_labeled = 1;    // N
  int m_unlabeled = 0;  // M
};

// How the unlabeled branch weight is derived from the batch composition.
enum class UnlabeledWeightMode { ratio_to_labeled, fraction_of_batch };

struct LossBreakdown {
  double l_cls = 0.0;
  double l_reg = 0.0;
  double l_iou = 0.0;
  double total = 0.0;
  bool degenerate = false;  // no contributing predictions at all
};

// One frame's detection loss under an assignment: positives contribute all
// three terms against their matched target, negatives only the background
// classification term, ignored predictions nothing. Each component is
// averaged over its contributing predictions.
LossBreakdown frame_loss(const std::vector<Prediction>& preds,
                         const std::vector<PseudoBox>& targets, const AsaResult& assignment,
                         const LossWeights& w, double image_diag);

struct LossFrame {
  std::vector<Prediction> preds;
  std::vector<PseudoBox> targets;
  AsaResult assignment;
};

// Mean frame total over the unlabeled/labeled frames; empty input is an error.
double unlabeled_loss(const std::vector<LossFrame>& frames, const LossWeights& w,
                      double image_diag);
double labeled_loss(const std::vector<LossFrame>& frames, const LossWeights& w,
                    double image_diag);

double unlabeled_weight(const BatchComposition& batch,
                        UnlabeledWeightMode mode = UnlabeledWeightMode::ratio_to_labeled);
double total_loss(double l_u, double l_l, const BatchComposition& batch,
                  UnlabeledWeightMode mode = UnlabeledWeightMode::ratio_to_labeled);

// Greedy NMS at nms_iou followed by score thresholding; surviving predictions
// become pseudo-boxes carrying their score as confidence.
std::vector<PseudoBox> pseudo_filter(const std::vector<Prediction>& preds,
                                     double confidence_threshold, double nms_iou = 0.65);

}  // namespace crtrack
