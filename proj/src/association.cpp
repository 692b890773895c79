#include "crtrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crtrack {

TrackBank::TrackBank(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("TrackBank: capacity must be >= 1");
}

void TrackBank::push(const EmbeddingVec& e) {
  items_.push_back(e);
  if (static_cast<int>(items_.size()) > capacity_) items_.erase(items_.begin());
}

Matrix split_cosine_similarity(const std::vector<EmbeddingVec>& det_embs,
                               const std::vector<TrackBank>& banks, double tau,
                               Exec exec) {
  std::vector<std::vector<EmbeddingVec>> galleries;
  galleries.reserve(banks.size());
  for (const auto& b : banks) galleries.push_back(b.items());
  Matrix sim = kernels::bank_max_cosine(det_embs, galleries, exec);
  for (double& v : sim.data) {
    v = std::clamp(v, 0.0, 1.0);
    if (v < tau) v = 0.0;
  }
  return sim;
}

CostMatrix combined_cost(const Matrix& iou_m, const Matrix& sim,
                         const Matrix& direction_cost, const AssociationConfig& cfg) {
  if (sim.rows != iou_m.rows || sim.cols != iou_m.cols ||
      direction_cost.rows != iou_m.rows || direction_cost.cols != iou_m.cols)
    throw std::invalid_argument("combined_cost: matrix shape mismatch");
  CostMatrix out(iou_m.rows, iou_m.cols);
  for (int i = 0; i < iou_m.rows; ++i)
    for (int j = 0; j < iou_m.cols; ++j) {
      out.set_cost(i, j, (1.0 - iou_m.at(i, j)) -
                             cfg.appearance_weight * sim.at(i, j) +
                             cfg.ocm_weight * direction_cost.at(i, j));
      if (iou_m.at(i, j) < cfg.iou_gate && sim.at(i, j) == 0.0) out.forbid(i, j);
    }
  return out;
}

Tracker::Tracker(AssociationConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.bank_capacity < 1 || cfg_.min_hits < 1 || cfg_.max_age < 1)
    throw std::invalid_argument("Tracker: invalid configuration");
}

void Tracker::absorb(Entry& e, const Detection& det) {
  e.last_score = det.score;
  if (!det.embedding) return;
  e.bank.push(*det.embedding);
  if (!e.ema) {
    e.ema = *det.embedding;
    return;
  }
  // Deep-OC-SORT-style EMA embedding, renormalised after blending.
  double norm = 0.0;
  for (std::size_t i = 0; i < e.ema->dim(); ++i) {
    e.ema->values[i] =
        cfg_.ema_alpha * e.ema->values[i] + (1.0 - cfg_.ema_alpha) * det.embedding->values[i];
    norm += e.ema->values[i] * e.ema->values[i];
  }
  norm = std::sqrt(norm);
  if (norm > 1e-12)
    for (double& v : e.ema->values) v /= norm;
}

Matrix Tracker::similarity_rows(const std::vector<Detection>& dets) const {
  const int rows = static_cast<int>(dets.size());
  const int cols = static_cast<int>(tracks_.size());
  Matrix sim(rows, cols, 0.0);
  if (cfg_.appearance_weight == 0.0) return sim;

  if (cfg_.similarity_mode == SimilarityMode::split_cosine) {
    std::vector<int> rows_with_emb;
    std::vector<EmbeddingVec> embs;
    for (int i = 0; i < rows; ++i)
      if (dets[i].embedding) {
        rows_with_emb.push_back(i);
        embs.push_back(*dets[i].embedding);
      }
    if (embs.empty()) return sim;
    std::vector<TrackBank> banks;
    banks.reserve(tracks_.size());
    for (const auto& t : tracks_) banks.push_back(t.bank);
    const Matrix packed =
        split_cosine_similarity(embs, banks, cfg_.similarity_threshold);
    for (std::size_t r = 0; r < rows_with_emb.size(); ++r)
      for (int j = 0; j < cols; ++j)
        sim.at(rows_with_emb[r], j) = packed.at(static_cast<int>(r), j);
    return sim;
  }

  for (int i = 0; i < rows; ++i) {
    if (!dets[i].embedding) continue;
    for (int j = 0; j < cols; ++j) {
      if (!tracks_[j].ema) continue;
      sim.at(i, j) = std::max(0.0, cosine_similarity(*dets[i].embedding, *tracks_[j].ema));
    }
  }
  return sim;
}

Matrix Tracker::direction_rows(const std::vector<Detection>& dets) const {
  const int rows = static_cast<int>(dets.size());
  const int cols = static_cast<int>(tracks_.size());
  Matrix dir(rows, cols, 0.0);
  if (cfg_.ocm_weight == 0.0) return dir;
  for (int j = 0; j < cols; ++j) {
    const auto vd = velocity_direction(tracks_[j].kf, cfg_.velocity_span);
    if (!vd || !tracks_[j].kf.last_observation) continue;
    const BoundingBox& anchor = tracks_[j].kf.last_observation->second;
    for (int i = 0; i < rows; ++i) {
      const double dx = dets[i].box.center_x() - anchor.center_x();
      const double dy = dets[i].box.center_y() - anchor.center_y();
      const double n = std::sqrt(dx * dx + dy * dy);
      if (n <= 1e-12) continue;
      const double cosang =
          std::clamp(((*vd)[0] * dx + (*vd)[1] * dy) / n, -1.0, 1.0);
      dir.at(i, j) = std::acos(cosang) / 3.141592653589793238;
    }
  }
  return dir;
}

std::vector<TrackOutput> Tracker::track_step(int frame,
                                             const std::vector<Detection>& detections) {
  if (last_frame_ && frame <= *last_frame_)
    throw std::invalid_argument("track_step: frame index must strictly increase");
  for (const auto& d : detections) {
    if (d.frame != frame)
      throw std::invalid_argument("track_step: detection frame mismatch");
    if (!d.box.valid() || !std::isfinite(d.score))
      throw std::invalid_argument("track_step: invalid detection");
  }
  last_frame_ = frame;
  steps_ += 1;

  for (auto& t : tracks_) t.kf = kf_predict(t.kf, cfg_.kalman);

  const int n_det = static_cast<int>(detections.size());
  const int n_trk = static_cast<int>(tracks_.size());
  std::vector<char> det_matched(n_det, false), trk_matched(n_trk, false);
  std::vector<std::pair<int, int>> matches;  // (det, track)

  if (n_det > 0 && n_trk > 0) {
    std::vector<BoundingBox> det_boxes, trk_boxes;
    det_boxes.reserve(n_det);
    trk_boxes.reserve(n_trk);
    for (const auto& d : detections) det_boxes.push_back(d.box);
    for (const auto& t : tracks_) trk_boxes.push_back(t.kf.box());
    const Matrix iou_m = kernels::iou_matrix(det_boxes, trk_boxes);
    const CostMatrix cost =
        combined_cost(iou_m, similarity_rows(detections), direction_rows(detections), cfg_);
    for (const auto& [di, tj] : solve_assignment(cost).matches) {
      matches.emplace_back(di, tj);
      det_matched[di] = true;
      trk_matched[tj] = true;
    }
  }

  if (cfg_.second_stage_enabled) {
    std::vector<int> rem_det, rem_trk;
    for (int i = 0; i < n_det; ++i)
      if (!det_matched[i]) rem_det.push_back(i);
    for (int j = 0; j < n_trk; ++j)
      if (!trk_matched[j] && tracks_[j].kf.last_observation) rem_trk.push_back(j);
    if (!rem_det.empty() && !rem_trk.empty()) {
      std::vector<BoundingBox> det_boxes, obs_boxes;
      for (int i : rem_det) det_boxes.push_back(detections[i].box);
      for (int j : rem_trk) obs_boxes.push_back(tracks_[j].kf.last_observation->second);
      const Matrix iou_m = kernels::iou_matrix(det_boxes, obs_boxes);
      CostMatrix cost(iou_m.rows, iou_m.cols);
      for (int i = 0; i < iou_m.rows; ++i)
        for (int j = 0; j < iou_m.cols; ++j) {
          cost.set_cost(i, j, 1.0 - iou_m.at(i, j));
          if (iou_m.at(i, j) < cfg_.iou_gate) cost.forbid(i, j);
        }
      for (const auto& [ri, rj] : solve_assignment(cost).matches) {
        const int di = rem_det[ri];
        const int tj = rem_trk[rj];
        matches.emplace_back(di, tj);
        det_matched[di] = true;
        trk_matched[tj] = true;
      }
    }
  }

  for (const auto& [di, tj] : matches) {
    Entry& t = tracks_[tj];
    const int gap = t.kf.time_since_update;
    if (gap > 1 && cfg_.oru_enabled)
      t.kf = oru_reupdate(t.kf, detections[di].box, gap, cfg_.kalman);
    else
      t.kf = kf_update(t.kf, detections[di].box, cfg_.kalman);
    absorb(t, detections[di]);
  }

  for (int i = 0; i < n_det; ++i) {
    if (det_matched[i]) continue;
    Entry e{kf_init(detections[i].box, next_id_++, cfg_.kalman),
            TrackBank(cfg_.bank_capacity), std::nullopt, 0.0};
    e.kf.creation_frame = frame;
    e.kf.last_observation = {frame, detections[i].box};
    e.kf.observation_history.emplace_back(frame, detections[i].box);
    absorb(e, detections[i]);
    tracks_.push_back(std::move(e));
  }

  std::erase_if(tracks_, [&](const Entry& t) {
    return t.kf.time_since_update > cfg_.max_age;
  });

  std::vector<TrackOutput> out;
  for (const auto& t : tracks_)
    if (t.kf.time_since_update == 0 &&
        (t.kf.hits >= cfg_.min_hits || steps_ <= cfg_.min_hits))
      // Report the associated detection, not the filter posterior: the filter
      // exists to predict, and callers scoring against ground truth should see
      // the boxes that were actually matched.
      out.push_back({t.kf.track_id, t.kf.last_observation->second, t.last_score});
  std::sort(out.begin(), out.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace crtrack
