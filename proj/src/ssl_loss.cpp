#include "crtrack/ssl_loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crtrack {

namespace {

constexpr double kScoreFloor = 1e-7;

// Hard 0/1 targets take the one-sided form so a perfect prediction costs
// exactly 0 instead of the clamp epsilon.
double bce(double score, double target) {
  if (target >= 1.0) return -std::log(std::clamp(score, kScoreFloor, 1.0));
  if (target <= 0.0) return -std::log(std::clamp(1.0 - score, kScoreFloor, 1.0));
  const double p = std::clamp(score, kScoreFloor, 1.0 - kScoreFloor);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

double reg_loss(const BoundingBox& a, const BoundingBox& b, double image_diag) {
  const double dcx = std::abs(a.center_x() - b.center_x()) / image_diag;
  const double dcy = std::abs(a.center_y() - b.center_y()) / image_diag;
  const double dw = std::abs(std::log(a.width) - std::log(b.width));
  const double dh = std::abs(std::log(a.height) - std::log(b.height));
  return 0.25 * (dcx + dcy + dw + dh);
}

double mean_total(const std::vector<LossFrame>& frames, const LossWeights& w,
                  double image_diag, const char* who) {
  if (frames.empty())
    throw std::invalid_argument(std::string(who) + ": empty frame list");
  double sum = 0.0;
  for (const auto& f : frames)
    sum += frame_loss(f.preds, f.targets, f.assignment, w, image_diag).total;
  return sum / static_cast<double>(frames.size());
}

}  // namespace

LossBreakdown frame_loss(const std::vector<Prediction>& preds,
                         const std::vector<PseudoBox>& targets, const AsaResult& assignment,
                         const LossWeights& w, double image_diag) {
  if (!(image_diag > 0.0))
    throw std::invalid_argument("frame_loss: image_diag must be positive");
  const int n = static_cast<int>(preds.size());
  const int m = static_cast<int>(targets.size());

  double cls_sum = 0.0, reg_sum = 0.0, iou_sum = 0.0;
  int n_pos = 0, n_neg = 0;
  for (const auto& [i, j] : assignment.positives) {
    if (i < 0 || i >= n || j < 0 || j >= m)
      throw std::invalid_argument("frame_loss: assignment index out of range");
    cls_sum += bce(preds[i].score(), 1.0);
    reg_sum += reg_loss(preds[i].box, targets[j].box, image_diag);
    iou_sum += 1.0 - iou(preds[i].box, targets[j].box);
    ++n_pos;
  }
  for (int i : assignment.negatives) {
    if (i < 0 || i >= n)
      throw std::invalid_argument("frame_loss: assignment index out of range");
    cls_sum += bce(preds[i].score(), 0.0);
    ++n_neg;
  }

  LossBreakdown out;
  if (n_pos + n_neg > 0) out.l_cls = cls_sum / (n_pos + n_neg);
  if (n_pos > 0) {
    out.l_reg = reg_sum / n_pos;
    out.l_iou = iou_sum / n_pos;
  }
  out.degenerate = (n_pos + n_neg == 0);
  out.total = w.lambda_cls * out.l_cls + w.lambda_reg * out.l_reg + w.lambda_iou * out.l_iou;
  return out;
}

double unlabeled_loss(const std::vector<LossFrame>& frames, const LossWeights& w,
                      double image_diag) {
  return mean_total(frames, w, image_diag, "unlabeled_loss");
}

double labeled_loss(const std::vector<LossFrame>& frames, const LossWeights& w,
                    double image_diag) {
  return mean_total(frames, w, image_diag, "labeled_loss");
}

double unlabeled_weight(const BatchComposition& batch, UnlabeledWeightMode mode) {
  if (batch.n_labeled < 1)
    throw std::invalid_argument("unlabeled_weight: batch needs at least one labeled frame");
  if (batch.m_unlabeled < 0)
    throw std::invalid_argument("unlabeled_weight: negative unlabeled count");
  const double m = batch.m_unlabeled;
  const double n = batch.n_labeled;
  return mode == UnlabeledWeightMode::ratio_to_labeled ? m / n : m / (m + n);
}

double total_loss(double l_u, double l_l, const BatchComposition& batch,
                  UnlabeledWeightMode mode) {
  if (!std::isfinite(l_u) || !std::isfinite(l_l))
    throw std::invalid_argument("total_loss: non-finite branch loss");
  return unlabeled_weight(batch, mode) * l_u + l_l;
}

std::vector<PseudoBox> pseudo_filter(const std::vector<Prediction>& preds,
                                     double confidence_threshold, double nms_iou) {
  for (const auto& p : preds)
    if (!p.box.valid()) throw std::invalid_argument("pseudo_filter: invalid box");
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].score() > preds[b].score();
  });

  std::vector<char> suppressed(preds.size(), false);
  std::vector<PseudoBox> out;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const int i = order[a];
    if (suppressed[i]) continue;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const int j = order[b];
      if (!suppressed[j] && iou(preds[i].box, preds[j].box) > nms_iou)
        suppressed[j] = true;
    }
    if (preds[i].score() >= confidence_threshold)
      out.push_back({preds[i].box, preds[i].score()});
  }
  return out;
}

}  // namespace crtrack
