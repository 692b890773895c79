#pragma once

#include <optional>
#include <vector>

#include "crtrack/assignment.hpp"
#include "crtrack/core.hpp"
#include "crtrack/kernels.hpp"
#include "crtrack/matrix.hpp"
#include "crtrack/motion.hpp"
#include "crtrack/parallel.hpp"

namespace crtrack {

// split_cosine keeps a bank of recent embeddings per track, max-pools the
// pairwise cosines and zeroes entries below the similarity threshold;
// matrix_product keeps one EMA embedding per track and uses the raw product.
enum class SimilarityMode { split_cosine, matrix_product };

struct AssociationConfig {
  double iou_gate = 0.3;
  double appearance_weight = 0.25;
  double similarity_threshold = 0.25;
  double ocm_weight = 0.2;
  int velocity_span = 3;
  int min_hits = 3;
  int max_age = 30;
  bool second_stage_enabled = true;
  bool oru_enabled = true;
  SimilarityMode similarity_mode = SimilarityMode::split_cosine;
  int bank_capacity = 10;
  double ema_alpha = 0.9;  // matrix_product mode only
  KalmanParams kalman;
};

// Fixed-capacity appearance bank, oldest embedding dropped first.
class TrackBank {
 public:
  explicit TrackBank(int capacity = 10);
  void push(const EmbeddingVec& e);
  const std::vector<EmbeddingVec>& items() const { return items_; }
  int capacity() const { return capacity_; }

 private:
  int capacity_;
  std::vector<EmbeddingVec> items_;
};

// Max-pooled pairwise cosine per (detection, bank), clamped to [0, 1], with
// entries below tau set to exactly 0. Empty banks give 0.
Matrix split_cosine_similarity(const std::vector<EmbeddingVec>& det_embs,
                               const std::vector<TrackBank>& banks, double tau,
                               Exec exec = Exec::parallel);

// cost = (1 - iou) - appearance_weight * sim + ocm_weight * direction_cost;
// cells with iou below the gate and zero similarity are forbidden.
CostMatrix combined_cost(const Matrix& iou_m, const Matrix& sim,
                         const Matrix& direction_cost, const AssociationConfig& cfg);

struct TrackOutput {
  int track_id = 0;
  BoundingBox box;
  double score = 0.0;
};

class Tracker {
 public:
  explicit Tracker(AssociationConfig cfg = {});

  // Advances one frame. Frames must be strictly increasing; detections must
  // carry the same frame index. Missing embeddings fall back to motion-only
  // association for that detection.
  std::vector<TrackOutput> track_step(int frame, const std::vector<Detection>& detections);

  const AssociationConfig& config() const { return cfg_; }
  int live_tracks() const { return static_cast<int>(tracks_.size()); }

 private:
  struct Entry {
    KalmanTrack kf;
    TrackBank bank;
    std::optional<EmbeddingVec> ema;
    double last_score = 0.0;
  };

  void absorb(Entry& e, const Detection& det);
  Matrix similarity_rows(const std::vector<Detection>& dets) const;
  Matrix direction_rows(const std::vector<Detection>& dets) const;

  AssociationConfig cfg_;
  std::vector<Entry> tracks_;
  int next_id_ = 1;
  std::optional<int> last_frame_;
  int steps_ = 0;
};

}  // namespace crtrack
