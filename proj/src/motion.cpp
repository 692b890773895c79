#include "crtrack/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crtrack {

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat47 = Eigen::Matrix<double, 4, 7>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

Mat7 transition() {
  Mat7 f = Mat7::Identity();
  f(0, 4) = 1.0;
  f(1, 5) = 1.0;
  f(2, 6) = 1.0;
  return f;
}

Mat47 observation_model() {
  Mat47 h = Mat47::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  h(2, 2) = 1.0;
  h(3, 3) = 1.0;
  return h;
}

Mat7 process_noise(const KalmanParams& p) {
  Mat7 q = Mat7::Zero();
  q.diagonal().head<4>().setConstant(p.process_position_noise);
  q.diagonal().tail<3>().setConstant(p.process_velocity_noise);
  return q;
}

Mat4 measurement_noise(const KalmanParams& p) {
  Mat4 r = Mat4::Zero();
  r(0, 0) = p.measurement_position_noise;
  r(1, 1) = p.measurement_position_noise;
  r(2, 2) = p.measurement_area_noise;
  r(3, 3) = p.measurement_area_noise;
  return r;
}

Vec4 measure(const BoundingBox& box) {
  const CenterForm c = box_to_center(box);
  return Vec4(c.cx, c.cy, c.area, c.aspect);
}

// Raw filter predict; zeroes the area velocity when it would drive the
// predicted area non-positive. Returns whether that clamp fired.
bool predict_state(Vec7& x, Mat7& p, const KalmanParams& params) {
  bool clamped = false;
  if (x(2) + x(6) <= 0.0) {
    x(6) = 0.0;
    clamped = true;
  }
  const Mat7 f = transition();
  x = f * x;
  p = f * p * f.transpose() + process_noise(params);
  return clamped;
}

// Joseph-form update keeps the covariance symmetric positive semi-definite.
void update_state(Vec7& x, Mat7& p, const Vec4& z, const KalmanParams& params) {
  const Mat47 h = observation_model();
  const Mat4 r = measurement_noise(params);
  const Vec4 y = z - h * x;
  const Mat4 s = h * p * h.transpose() + r;
  const Eigen::Matrix<double, 7, 4> k = p * h.transpose() * s.inverse();
  x += k * y;
  const Mat7 a = Mat7::Identity() - k * h;
  p = a * p * a.transpose() + k * r * k.transpose();
}

void require_valid(const BoundingBox& box, const char* who) {
  if (!box.valid()) throw std::invalid_argument(std::string(who) + ": invalid box");
}

}  // namespace

BoundingBox KalmanTrack::box() const {
  CenterForm c{state(0), state(1), std::max(state(2), 1e-6),
               std::max(state(3), 1e-6)};
  return center_to_box(c);
}

KalmanTrack kf_init(const BoundingBox& box, int track_id, const KalmanParams& params) {
  require_valid(box, "kf_init");
  KalmanTrack t;
  t.track_id = track_id;
  t.state.setZero();
  t.state.head<4>() = measure(box);
  t.covariance.setZero();
  t.covariance.diagonal().head<4>().setConstant(params.init_position_var);
  t.covariance.diagonal().tail<3>().setConstant(params.init_velocity_var);
  t.anchor_state = t.state;
  t.anchor_covariance = t.covariance;
  return t;
}

KalmanTrack kf_predict(const KalmanTrack& track, const KalmanParams& params) {
  KalmanTrack t = track;
  t.area_clamped = predict_state(t.state, t.covariance, params);
  t.age += 1;
  if (t.time_since_update > 0) t.hits = 0;
  t.time_since_update += 1;
  return t;
}

KalmanTrack kf_update(const KalmanTrack& track, const BoundingBox& observation,
                      const KalmanParams& params) {
  require_valid(observation, "kf_update");
  KalmanTrack t = track;
  update_state(t.state, t.covariance, measure(observation), params);
  t.hits += 1;
  t.time_since_update = 0;
  const int frame = t.current_frame();
  t.last_observation = {frame, observation};
  t.observation_history.emplace_back(frame, observation);
  t.anchor_state = t.state;
  t.anchor_covariance = t.covariance;
  return t;
}

KalmanTrack oru_reupdate(const KalmanTrack& track, const BoundingBox& new_obs,
                         int gap, const KalmanParams& params) {
  require_valid(new_obs, "oru_reupdate");
  if (gap < 1) throw std::invalid_argument("oru_reupdate: gap must be >= 1");
  if (!track.last_observation)
    throw std::invalid_argument("oru_reupdate: no anchor observation");

  const CenterForm from = box_to_center(track.last_observation->second);
  const CenterForm to = box_to_center(new_obs);

  KalmanTrack t = track;
  t.state = t.anchor_state;
  t.covariance = t.anchor_covariance;
  for (int i = 1; i <= gap; ++i) {
    t.area_clamped = predict_state(t.state, t.covariance, params);
    Vec4 z;
    if (i == gap) {
      z = measure(new_obs);
    } else {
      const double a = static_cast<double>(i) / gap;
      z = Vec4(from.cx + a * (to.cx - from.cx), from.cy + a * (to.cy - from.cy),
               from.area + a * (to.area - from.area),
               from.aspect + a * (to.aspect - from.aspect));
    }
    update_state(t.state, t.covariance, z, params);
  }
  t.hits += 1;
  t.time_since_update = 0;
  const int frame = t.current_frame();
  t.last_observation = {frame, new_obs};
  t.observation_history.emplace_back(frame, new_obs);
  t.anchor_state = t.state;
  t.anchor_covariance = t.covariance;
  return t;
}

std::optional<std::array<double, 2>> velocity_direction(const KalmanTrack& track,
                                                        int span) {
  if (span < 1) throw std::invalid_argument("velocity_direction: span must be >= 1");
  const auto& hist = track.observation_history;
  if (hist.size() < static_cast<std::size_t>(span) + 1) return std::nullopt;
  const BoundingBox& a = hist[hist.size() - 1 - span].second;
  const BoundingBox& b = hist.back().second;
  const double dx = b.center_x() - a.center_x();
  const double dy = b.center_y() - a.center_y();
  const double n = std::sqrt(dx * dx + dy * dy);
  if (n <= 1e-12) return std::nullopt;
  return std::array<double, 2>{dx / n, dy / n};
}

}  // namespace crtrack
