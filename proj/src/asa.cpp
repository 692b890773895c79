#include "crtrack/asa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crtrack {

namespace {

constexpr double kScoreFloor = 1e-7;

double bce_to_one(double score) {
  return -std::log(std::clamp(score, kScoreFloor, 1.0));
}

double bce_soft(double score, double target) {
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

bool is_candidate(const Prediction& pred, const PseudoBox& pseudo,
                  double radius_scale) {
  const double cx = pred.box.center_x();
  const double cy = pred.box.center_y();
  const BoundingBox& y = pseudo.box;
  if (cx >= y.x_left && cx <= y.right() && cy >= y.y_top && cy <= y.bottom())
    return true;
  return center_distance(pred.box, y) <= radius_scale * std::sqrt(y.area());
}

}  // namespace

double pair_cost(const Prediction& pred, const PseudoBox& pseudo, const AsaWeights& w,
                 double image_diag, bool soft_target) {
  if (!(image_diag > 0.0))
    throw std::invalid_argument("pair_cost: image_diag must be positive");
  if (!pred.box.valid() || !pseudo.box.valid())
    throw std::invalid_argument("pair_cost: invalid box");
  const double l_cls = soft_target ? bce_soft(pred.score(), pseudo.confidence)
                                   : bce_to_one(pred.score());
  const double l_reg = reg_loss(pred.box, pseudo.box, image_diag);
  const double l_iou = 1.0 - iou(pred.box, pseudo.box);
  const double c_dis = center_distance(pred.box, pseudo.box) / image_diag;
  return w.lambda_cls * l_cls + w.lambda_reg * l_reg + w.lambda_iou * l_iou +
         w.lambda_dis * c_dis;
}

CostMatrix build_cost_matrix(const std::vector<Prediction>& preds,
                             const std::vector<PseudoBox>& pseudos, const AsaWeights& w,
                             const AsaConfig& cfg, double image_diag, Exec exec) {
  if (!(image_diag > 0.0))
    throw std::invalid_argument("build_cost_matrix: image_diag must be positive");
  for (const auto& p : preds)
    if (!p.box.valid()) throw std::invalid_argument("build_cost_matrix: invalid prediction");
  for (const auto& y : pseudos)
    if (!y.box.valid()) throw std::invalid_argument("build_cost_matrix: invalid pseudo-box");

  const int n = static_cast<int>(preds.size());
  const int m = static_cast<int>(pseudos.size());
  CostMatrix out(n, m, std::numeric_limits<double>::infinity());
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      if (is_candidate(preds[i], pseudos[j], cfg.candidate_radius_scale))
        out.set_cost(i, j,
                     pair_cost(preds[i], pseudos[j], w, image_diag, cfg.soft_targets));
      else
        out.forbid(i, j);
    }
  return out;
}

AsaResult asa_assign(const CostMatrix& cost, const AsaConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("asa_assign: k must be >= 1");
  if (!std::isfinite(cfg.negative_cost_threshold))
    throw std::invalid_argument("asa_assign: non-finite threshold");
  const int n = cost.rows();
  const int m = cost.cols();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (!cost.is_forbidden(i, j) && !std::isfinite(cost.cost(i, j)))
        throw std::invalid_argument("asa_assign: non-finite candidate cost");

  // Claim the k cheapest candidates per pseudo-label.
  std::vector<std::vector<int>> claimed_by(n);
  for (int j = 0; j < m; ++j) {
    std::vector<std::pair<double, int>> ranked;
    for (int i = 0; i < n; ++i)
      if (!cost.is_forbidden(i, j)) ranked.emplace_back(cost.cost(i, j), i);
    std::sort(ranked.begin(), ranked.end());
    const int take = std::min<int>(cfg.k, static_cast<int>(ranked.size()));
    for (int r = 0; r < take; ++r) claimed_by[ranked[r].second].push_back(j);
  }

  AsaResult out;
  std::vector<char> positive(n, false);
  for (int i = 0; i < n; ++i) {
    if (claimed_by[i].empty()) continue;
    int best_j = claimed_by[i].front();
    for (int j : claimed_by[i])
      if (cost.cost(i, j) < cost.cost(i, best_j)) best_j = j;
    if (cost.cost(i, best_j) <= cfg.negative_cost_threshold) {
      out.positives.emplace_back(i, best_j);
      positive[i] = true;
    }
  }

  for (int i = 0; i < n; ++i) {
    if (positive[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int j = 0; j < m; ++j)
      if (!cost.is_forbidden(i, j)) {
        any = true;
        best = std::min(best, cost.cost(i, j));
      }
    if (!any || best > cfg.negative_cost_threshold)
      out.negatives.push_back(i);
    else
      out.ignored.push_back(i);
  }
  return out;
}

std::vector<ConsistencyViolation> pseudo_consistency_check(
    const std::vector<Prediction>& preds, const std::vector<PseudoBox>& pseudos,
    const AsaResult& result, const AsaWeights& w, const AsaConfig& cfg,
    double image_diag) {
  const CostMatrix cost =
      build_cost_matrix(preds, pseudos, w, cfg, image_diag, Exec::serial);
  std::vector<ConsistencyViolation> violations;
  for (const auto& [i, j] : result.positives) {
    if (i < 0 || i >= cost.rows() || j < 0 || j >= cost.cols())
      throw std::invalid_argument("pseudo_consistency_check: index out of range");
    std::vector<double> ranked;
    for (int r = 0; r < cost.rows(); ++r)
      if (!cost.is_forbidden(r, j)) ranked.push_back(cost.cost(r, j));
    std::sort(ranked.begin(), ranked.end());
    if (cost.is_forbidden(i, j)) {
      violations.push_back({i, j, std::numeric_limits<double>::infinity(),
                            ranked.empty() ? 0.0 : ranked.back()});
      continue;
    }
    const std::size_t rank = std::min<std::size_t>(cfg.k, ranked.size());
    const double boundary = ranked[rank - 1];
    if (cost.cost(i, j) > boundary)
      violations.push_back({i, j, cost.cost(i, j), boundary});
  }
  return violations;
}

}  // namespace crtrack
