#pragma once

// Reference results for the test suite, re-derived from the rule statements
// by brute force. Nothing here shares code with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "crtrack/core.hpp"
#include "crtrack/matrix.hpp"
#include "crtrack/metrics.hpp"

namespace oracle {

struct BruteAssignment {
  int cardinality = 0;
  double cost = 0.0;
  std::vector<std::pair<int, int>> matches;  // row order
};

namespace detail {

inline void brute_rec(const crtrack::CostMatrix& m, int row, std::vector<int>& col_of,
                      std::vector<char>& used, BruteAssignment& best) {
  if (row == m.rows()) {
    int card = 0;
    double cost = 0.0;
    std::vector<std::pair<int, int>> matches;
    for (int i = 0; i < m.rows(); ++i)
      if (col_of[i] >= 0) {
        ++card;
        cost += m.cost(i, col_of[i]);
        matches.emplace_back(i, col_of[i]);
      }
    if (card > best.cardinality || (card == best.cardinality && cost < best.cost)) {
      best.cardinality = card;
      best.cost = cost;
      best.matches = std::move(matches);
    }
    return;
  }
  col_of[row] = -1;
  brute_rec(m, row + 1, col_of, used, best);
  for (int j = 0; j < m.cols(); ++j) {
    if (used[j] || m.is_forbidden(row, j)) continue;
    used[j] = 1;
    col_of[row] = j;
    brute_rec(m, row + 1, col_of, used, best);
    col_of[row] = -1;
    used[j] = 0;
  }
}

}  // namespace detail

// Exhaustive search maximising match count over allowed cells, then
// minimising total cost. Feasible up to roughly 7x7.
inline BruteAssignment brute_assignment(const crtrack::CostMatrix& m) {
  BruteAssignment best;
  best.cost = 1e300;
  if (m.rows() == 0 || m.cols() == 0) {
    best.cost = 0.0;
    return best;
  }
  std::vector<int> col_of(m.rows(), -1);
  std::vector<char> used(m.cols(), 0);
  detail::brute_rec(m, 0, col_of, used, best);
  return best;
}

struct AsaOracle {
  std::vector<std::pair<int, int>> positives;  // (pred, pseudo), sorted
  std::vector<int> negatives;
  std::vector<int> ignored;
};

// Straight-line reading of the sampling-assignment rules: per pseudo take the
// k cheapest candidates (ties to the lower prediction index), resolve multiple
// claims to the cheapest pseudo (ties to the lower pseudo index), drop claims
// above the threshold, then bucket what is left by its cheapest candidate
// cost.
inline AsaOracle asa_rules(const std::vector<std::vector<double>>& cost,
                           const std::vector<std::vector<char>>& candidate, int k,
                           double threshold) {
  const int np = static_cast<int>(cost.size());
  const int ns = np > 0 ? static_cast<int>(cost[0].size()) : 0;
  std::vector<std::vector<int>> claims(np);
  for (int j = 0; j < ns; ++j) {
    std::vector<std::pair<double, int>> cands;
    for (int i = 0; i < np; ++i)
      if (candidate[i][j]) cands.emplace_back(cost[i][j], i);
    std::sort(cands.begin(), cands.end());
    for (int r = 0; r < std::min<int>(k, cands.size()); ++r)
      claims[cands[r].second].push_back(j);
  }
  AsaOracle out;
  std::vector<char> settled(np, 0);
  for (int i = 0; i < np; ++i) {
    if (claims[i].empty()) continue;
    int best_j = claims[i][0];
    for (int j : claims[i])
      if (cost[i][j] < cost[i][best_j]) best_j = j;
    if (cost[i][best_j] <= threshold) {
      out.positives.emplace_back(i, best_j);
      settled[i] = 1;
    }
  }
  for (int i = 0; i < np; ++i) {
    if (settled[i]) continue;
    double min_cost = 1e300;
    bool any = false;
    for (int j = 0; j < ns; ++j)
      if (candidate[i][j]) {
        any = true;
        min_cost = std::min(min_cost, cost[i][j]);
      }
    if (!any || min_cost > threshold)
      out.negatives.push_back(i);
    else
      out.ignored.push_back(i);
  }
  std::sort(out.positives.begin(), out.positives.end());
  return out;
}

// Best identity-level true-positive count over every injective id mapping;
// counts[g][r] holds the number of frames the pair overlaps sufficiently.
inline long long best_idtp(const std::vector<std::vector<long long>>& counts) {
  const int ng = static_cast<int>(counts.size());
  const int nr = ng > 0 ? static_cast<int>(counts[0].size()) : 0;
  long long best = 0;
  std::vector<int> map_of(ng, -1);
  std::vector<char> used(nr, 0);
  auto rec = [&](auto&& self, int g, long long acc) -> void {
    if (g == ng) {
      best = std::max(best, acc);
      return;
    }
    self(self, g + 1, acc);
    for (int r = 0; r < nr; ++r) {
      if (used[r]) continue;
      used[r] = 1;
      self(self, g + 1, acc + counts[g][r]);
      used[r] = 0;
    }
  };
  rec(rec, 0, 0);
  return best;
}

struct ClearByRules {
  long long tp = 0, fp = 0, fn = 0, idsw = 0, gt_total = 0;
  double mota = 0.0;
};

// The CLEAR procedure replayed with exhaustive remainder matching: keep
// remembered correspondences in gt listing order while they still overlap,
// brute-force the leftover boxes at minimum total (1 - IoU), and charge a
// switch when a gt identity resumes under a different result id.
inline ClearByRules clear_by_rules(const crtrack::GtSequence& gt,
                                   const crtrack::ResultSequence& res,
                                   double iou_threshold) {
  ClearByRules out;
  std::map<int, int> memory;  // gt id -> res id
  std::vector<int> frames;
  for (const auto& [f, boxes] : gt) {
    frames.push_back(f);
    out.gt_total += static_cast<long long>(boxes.size());
  }
  for (const auto& [f, boxes] : res)
    if (gt.find(f) == gt.end()) frames.push_back(f);
  std::sort(frames.begin(), frames.end());

  static const std::vector<crtrack::GtBox> no_gt;
  static const std::vector<crtrack::ResBox> no_res;
  for (int frame : frames) {
    const auto git = gt.find(frame);
    const auto rit = res.find(frame);
    const auto& gboxes = git == gt.end() ? no_gt : git->second;
    const auto& rboxes = rit == res.end() ? no_res : rit->second;
    const int ng = static_cast<int>(gboxes.size());
    const int nr = static_cast<int>(rboxes.size());

    std::vector<char> g_used(ng, 0), r_used(nr, 0);
    std::vector<std::pair<int, int>> matched;
    for (int i = 0; i < ng; ++i) {
      const auto prev = memory.find(gboxes[i].id);
      if (prev == memory.end()) continue;
      for (int j = 0; j < nr; ++j)
        if (!r_used[j] && rboxes[j].id == prev->second &&
            crtrack::iou(gboxes[i].box, rboxes[j].box) >= iou_threshold) {
          matched.emplace_back(i, j);
          g_used[i] = 1;
          r_used[j] = 1;
          break;
        }
    }

    std::vector<int> g_free, r_free;
    for (int i = 0; i < ng; ++i)
      if (!g_used[i]) g_free.push_back(i);
    for (int j = 0; j < nr; ++j)
      if (!r_used[j]) r_free.push_back(j);
    if (!g_free.empty() && !r_free.empty()) {
      crtrack::CostMatrix cost(static_cast<int>(g_free.size()),
                               static_cast<int>(r_free.size()));
      for (std::size_t a = 0; a < g_free.size(); ++a)
        for (std::size_t b = 0; b < r_free.size(); ++b) {
          const double v = crtrack::iou(gboxes[g_free[a]].box, rboxes[r_free[b]].box);
          cost.set_cost(static_cast<int>(a), static_cast<int>(b), 1.0 - v);
          if (v < iou_threshold) cost.forbid(static_cast<int>(a), static_cast<int>(b));
        }
      for (const auto& [a, b] : brute_assignment(cost).matches)
        matched.emplace_back(g_free[a], r_free[b]);
    }

    out.tp += static_cast<long long>(matched.size());
    out.fn += ng - static_cast<long long>(matched.size());
    out.fp += nr - static_cast<long long>(matched.size());
    for (const auto& [i, j] : matched) {
      const auto prev = memory.find(gboxes[i].id);
      if (prev != memory.end() && prev->second != rboxes[j].id) out.idsw += 1;
      memory[gboxes[i].id] = rboxes[j].id;
    }
  }
  out.mota = 1.0 - static_cast<double>(out.fp + out.fn + out.idsw) /
                       static_cast<double>(out.gt_total);
  return out;
}

struct HotaByDefinition {
  bool forced = true;  // false when any frame had an ambiguous candidate
  double hota = 0.0, deta = 0.0, assa = 0.0;
  std::array<double, crtrack::kHotaAlphaCount> tp{}, fn{}, fp{}, ass{};
};

// Definition-level HOTA for instances whose per-frame matching is forced:
// at every alpha each box may overlap at most one counterpart. The per-alpha
// scores then follow directly from pair counts, no assignment search needed.
inline HotaByDefinition hota_forced(const crtrack::GtSequence& gt,
                                    const crtrack::ResultSequence& res) {
  HotaByDefinition out;
  long long gt_total = 0, res_total = 0;
  std::map<int, long long> tg, tr;
  for (const auto& [f, boxes] : gt)
    for (const auto& b : boxes) {
      ++gt_total;
      ++tg[b.id];
    }
  for (const auto& [f, boxes] : res)
    for (const auto& b : boxes) {
      ++res_total;
      ++tr[b.id];
    }

  for (int a = 0; a < crtrack::kHotaAlphaCount; ++a) {
    const double alpha = 0.05 * (a + 1);
    std::map<std::pair<int, int>, long long> pair_count;
    long long tp = 0;
    for (const auto& [frame, gboxes] : gt) {
      const auto rit = res.find(frame);
      if (rit == res.end()) continue;
      std::map<int, int> g_hits, r_hits;
      for (const auto& g : gboxes)
        for (const auto& r : rit->second)
          if (crtrack::iou(g.box, r.box) >= alpha - 1e-12) {
            ++g_hits[g.id];
            ++r_hits[r.id];
            pair_count[{g.id, r.id}] += 1;
            ++tp;
          }
      for (const auto& [id, n] : g_hits)
        if (n > 1) out.forced = false;
      for (const auto& [id, n] : r_hits)
        if (n > 1) out.forced = false;
    }
    const double deta =
        gt_total + res_total - tp > 0
            ? static_cast<double>(tp) / static_cast<double>(gt_total + res_total - tp)
            : 0.0;
    double ass = 0.0;
    for (const auto& [pr, n] : pair_count)
      ass += static_cast<double>(n) * static_cast<double>(n) /
             static_cast<double>(tg[pr.first] + tr[pr.second] - n);
    const double assa = tp > 0 ? ass / static_cast<double>(tp) : 0.0;
    out.tp[a] = static_cast<double>(tp);
    out.fn[a] = static_cast<double>(gt_total - tp);
    out.fp[a] = static_cast<double>(res_total - tp);
    out.ass[a] = ass;
    out.deta += deta / crtrack::kHotaAlphaCount;
    out.assa += assa / crtrack::kHotaAlphaCount;
    out.hota += std::sqrt(deta * assa) / crtrack::kHotaAlphaCount;
  }
  return out;
}

}  // namespace oracle
