#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "crtrack/core.hpp"
#include "crtrack/metrics.hpp"

namespace crtrack {

// Scene layout for generated pedestrian sequences. Boxes follow constant
// velocity paths inside the image, reflecting off the borders.
struct ScenarioConfig {
  int num_frames = 100;
  int num_objects = 8;
  int width = 1920;
  int height = 1080;
  double speed_min = 2.0;      // px/frame
  double speed_max = 6.0;
  int crossings = 0;           // staged close encounters between object pairs
  bool bounce_crossings = false;  // encounter reverses both velocities
  std::uint64_t seed = 1;
};

// Detector corruption applied to clean ground truth. Every rate scales
// linearly with severity; severity 0 reproduces the input exactly.
struct CorruptionConfig {
  double severity = 0.0;        // in [0, 1]
  double miss_rate = 0.25;      // per-box drop probability at severity 1
  double jitter = 0.12;         // box noise, fraction of size at severity 1
  double fp_rate = 0.6;         // spurious boxes per frame at severity 1
  double score_noise = 0.25;    // subtracted score spread at severity 1
  double embedding_noise = 0.06; // per-dim sigma at severity 1
  double occlusion_iou = 0.4;   // overlap beyond this risks dropping the far box
  int embedding_dim = 16;
  std::uint64_t seed = 7;
};

// Ground truth plus per-identity appearance prototypes.
struct SyntheticTruth {
  GtSequence gt;
  std::vector<EmbeddingVec> prototypes;  // index = identity - 1
  int width = 0;
  int height = 0;
};

SyntheticTruth generate_truth(const ScenarioConfig& cfg);

// Detections with embeddings, keyed by frame.
using DetectionMap = std::map<int, std::vector<Detection>>;

DetectionMap corrupt(const SyntheticTruth& truth, const CorruptionConfig& cfg);

}  // namespace crtrack
