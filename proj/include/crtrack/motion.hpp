#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "crtrack/core.hpp"

namespace crtrack {

// Constant-velocity model over (cx, cy, area, aspect); aspect carries no
// velocity. Noise diagonals follow the usual SORT-family constants.
struct KalmanParams {
  double process_position_noise = 1.0;
  double process_velocity_noise = 0.01;
  double measurement_position_noise = 1.0;
  double measurement_area_noise = 10.0;
  double init_position_var = 10.0;
  double init_velocity_var = 1e4;
};

struct KalmanTrack {
  Eigen::Matrix<double, 7, 1> state;       // cx, cy, s, r, vcx, vcy, vs
  Eigen::Matrix<double, 7, 7> covariance;
  int track_id = 0;
  int age = 0;                    // predict count since creation
  int hits = 0;                   // consecutive-match count
  int time_since_update = 0;
  int creation_frame = 0;
  bool area_clamped = false;      // last predict zeroed the area velocity
  std::optional<std::pair<int, BoundingBox>> last_observation;
  std::vector<std::pair<int, BoundingBox>> observation_history;

  // Posterior at the last real update; anchor for the re-update replay.
  Eigen::Matrix<double, 7, 1> anchor_state;
  Eigen::Matrix<double, 7, 7> anchor_covariance;

  int current_frame() const { return creation_frame + age; }
  BoundingBox box() const;
};

KalmanTrack kf_init(const BoundingBox& box, int track_id,
                    const KalmanParams& params = {});
KalmanTrack kf_predict(const KalmanTrack& track, const KalmanParams& params = {});
KalmanTrack kf_update(const KalmanTrack& track, const BoundingBox& observation,
                      const KalmanParams& params = {});

// Replays the missed gap from the last-update posterior: predict/update
// through boxes linearly interpolated in center form between the last
// observation and new_obs, the final step being the real update. gap is the
// number of frames since the last update; gap = 1 reduces to kf_update.
KalmanTrack oru_reupdate(const KalmanTrack& track, const BoundingBox& new_obs,
                         int gap, const KalmanParams& params = {});

// Unit direction between the observation `span` entries back and the latest
// one; empty when the history is shorter than span + 1 or the centers
// coincide.
std::optional<std::array<double, 2>> velocity_direction(const KalmanTrack& track,
                                                        int span);

}  // namespace crtrack
