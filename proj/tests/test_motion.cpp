#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <stdexcept>

#include "crtrack/motion.hpp"
#include "crtrack/rng.hpp"
#include "doctest.h"

using namespace crtrack;

namespace {

double cov_asymmetry(const KalmanTrack& t) {
  return (t.covariance - t.covariance.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const KalmanTrack& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> es(t.covariance);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("kf_init places the state at the measured box with zero velocity") {
  const KalmanTrack t = kf_init({0, 0, 10, 20}, 1);
  CHECK(t.state(0) == doctest::Approx(5.0));
  CHECK(t.state(1) == doctest::Approx(10.0));
  CHECK(t.state(2) == doctest::Approx(200.0));
  CHECK(t.state(3) == doctest::Approx(0.5));
  CHECK(t.state(4) == 0.0);
  CHECK(t.state(5) == 0.0);
  CHECK(t.state(6) == 0.0);
  CHECK(cov_asymmetry(t) == 0.0);

  const KalmanTrack u = kf_init({0, 0, 10, 20}, 2);
  CHECK(t.track_id != u.track_id);
  CHECK_THROWS_AS(kf_init({0, 0, -1, 5}, 3), std::invalid_argument);
}

TEST_CASE("kf_predict advances positions by velocities and grows covariance") {
  KalmanTrack t = kf_init({0, 0, 10, 20}, 1);
  const double trace0 = t.covariance.trace();

  const KalmanTrack still = kf_predict(t);
  CHECK(still.state(0) == doctest::Approx(5.0));
  CHECK(still.state(1) == doctest::Approx(10.0));
  CHECK(still.covariance.trace() > trace0);
  CHECK(still.age == 1);
  CHECK(still.time_since_update == 1);

  t.state(4) = 1.0;
  t.state(5) = 2.0;
  const KalmanTrack moved = kf_predict(t);
  CHECK(moved.state(0) == doctest::Approx(6.0));
  CHECK(moved.state(1) == doctest::Approx(12.0));
  CHECK(moved.state(2) == doctest::Approx(200.0));
  CHECK(moved.state(3) == doctest::Approx(0.5));
}

TEST_CASE("kf_predict clamps an area velocity that would kill the box") {
  KalmanTrack t = kf_init({0, 0, 10, 20}, 1);
  t.state(6) = -300.0;  // would push area to -100
  const KalmanTrack p = kf_predict(t);
  CHECK(p.area_clamped);
  CHECK(p.state(2) > 0.0);
}

TEST_CASE("kf_update with the predicted measurement keeps the state") {
  KalmanTrack t = kf_init({0, 0, 10, 20}, 1);
  t = kf_predict(t);
  const BoundingBox predicted = t.box();
  const double prior_trace = t.covariance.trace();
  const KalmanTrack u = kf_update(t, predicted);
  CHECK(std::abs(u.state(0) - t.state(0)) < 1e-6);
  CHECK(std::abs(u.state(1) - t.state(1)) < 1e-6);
  CHECK(u.covariance.trace() <= prior_trace);
  CHECK(u.hits == 1);
  CHECK(u.time_since_update == 0);
  REQUIRE(u.observation_history.size() == 1);
}

TEST_CASE("repeated updates with a fixed box converge onto it") {
  // The default noise constants give a geometric approach with ratio around
  // 0.9 per step, so demand monotonicity, a 20x shrink by iteration 20, and
  // sub-1e-3 absolute error by iteration 60.
  // The center can overshoot while the velocity estimate unwinds, so the
  // decay is asserted on per-decade error envelopes, not per step.
  const BoundingBox target{40, 60, 30, 50};
  KalmanTrack t = kf_init({38, 58, 29, 49}, 1);
  const double initial_err = 5.0;
  std::array<double, 6> window_max{};
  double err_at_20 = 0.0;
  for (int it = 1; it <= 60; ++it) {
    t = kf_update(kf_predict(t), target);
    const BoundingBox b = t.box();
    const double err = std::abs(b.center_x() - target.center_x()) +
                       std::abs(b.center_y() - target.center_y());
    window_max[(it - 1) / 10] = std::max(window_max[(it - 1) / 10], err);
    if (it == 20) err_at_20 = err;
  }
  for (int w = 1; w < 6; ++w) CHECK(window_max[w] < window_max[w - 1]);
  CHECK(err_at_20 < initial_err / 20.0);
  const BoundingBox b = t.box();
  CHECK(std::abs(b.x_left - target.x_left) < 1e-3);
  CHECK(std::abs(b.y_top - target.y_top) < 1e-3);
  CHECK(std::abs(b.width - target.width) < 1e-3);
  CHECK(std::abs(b.height - target.height) < 1e-3);
}

TEST_CASE("consecutive-hit counter resets across a missed frame") {
  KalmanTrack t = kf_init({0, 0, 10, 20}, 1);
  t = kf_update(kf_predict(t), {1, 1, 10, 20});
  t = kf_update(kf_predict(t), {2, 2, 10, 20});
  CHECK(t.hits == 2);
  t = kf_predict(t);  // miss
  t = kf_predict(t);  // second miss zeroes the streak
  CHECK(t.hits == 0);
  t = kf_update(t, {5, 5, 10, 20});
  CHECK(t.hits == 1);
}

TEST_CASE("covariance stays symmetric and positive semidefinite under random use") {
  rng::Stream st(21);
  KalmanTrack t = kf_init({100, 100, 40, 80}, 1);
  for (int step = 0; step < 1000; ++step) {
    t = kf_predict(t);
    if (st.uniform() < 0.7) {
      const BoundingBox obs{t.box().x_left + st.normal(0.0, 2.0),
                            t.box().y_top + st.normal(0.0, 2.0),
                            std::max(5.0, t.box().width + st.normal(0.0, 1.0)),
                            std::max(5.0, t.box().height + st.normal(0.0, 1.0))};
      t = kf_update(t, obs);
    }
    CHECK(cov_asymmetry(t) < 1e-9);
    CHECK(min_eigenvalue(t) > -1e-9);
  }
}

TEST_CASE("noiseless constant velocity is predicted within a pixel after warmup") {
  const double vx = 3.0, vy = -2.0;
  KalmanTrack t = kf_init({100, 500, 40, 80}, 1);
  for (int frame = 1; frame <= 50; ++frame) {
    t = kf_predict(t);
    const double true_cx = 120.0 + vx * frame;  // center starts at (120, 540)
    const double true_cy = 540.0 + vy * frame;
    if (frame > 10) {
      CHECK(std::abs(t.box().center_x() - true_cx) < 1.0);
      CHECK(std::abs(t.box().center_y() - true_cy) < 1.0);
    }
    t = kf_update(t, {100.0 + vx * frame, 500.0 + vy * frame, 40, 80});
  }
}

TEST_CASE("oru_reupdate with gap 1 equals a plain update") {
  KalmanTrack t = kf_init({50, 50, 30, 60}, 1);
  t = kf_update(kf_predict(t), {52, 51, 30, 60});
  t = kf_predict(t);
  const BoundingBox obs{54, 52, 31, 61};
  const KalmanTrack via_update = kf_update(t, obs);
  const KalmanTrack via_oru = oru_reupdate(t, obs, 1);
  CHECK((via_update.state - via_oru.state).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((via_update.covariance - via_oru.covariance).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(via_oru.time_since_update == 0);
}

TEST_CASE("oru_reupdate rejects bad gaps and missing anchors") {
  KalmanTrack fresh = kf_init({0, 0, 10, 10}, 1);
  CHECK_THROWS_AS(oru_reupdate(fresh, {1, 1, 10, 10}, 1), std::invalid_argument);

  KalmanTrack t = kf_update(kf_predict(fresh), {1, 1, 10, 10});
  CHECK_THROWS_AS(oru_reupdate(t, {2, 2, 10, 10}, 0), std::invalid_argument);
}

TEST_CASE("oru_reupdate recovers velocity after an occlusion gap") {
  const double vx = 4.0, vy = 1.5;
  auto true_box = [&](int frame) {
    return BoundingBox{100.0 + vx * frame, 200.0 + vy * frame, 36, 90};
  };
  KalmanTrack t = kf_init(true_box(0), 1);
  for (int frame = 1; frame <= 9; ++frame) t = kf_update(kf_predict(t), true_box(frame));
  for (int frame = 10; frame <= 14; ++frame) t = kf_predict(t);  // occluded
  t = kf_predict(t);
  REQUIRE(t.time_since_update == 6);
  t = oru_reupdate(t, true_box(15), 6);
  CHECK(std::abs(t.state(4) - vx) < 0.1 * vx);
  CHECK(std::abs(t.state(5) - vy) < 0.1 * vy);
}

TEST_CASE("velocity_direction follows the observation history") {
  KalmanTrack t = kf_init({0, 0, 10, 10}, 1);
  CHECK_FALSE(velocity_direction(t, 1).has_value());  // no observations yet

  t = kf_update(kf_predict(t), {0, 0, 10, 10});
  CHECK_FALSE(velocity_direction(t, 1).has_value());  // single observation

  t = kf_update(kf_predict(t), {1, 0, 10, 10});
  t = kf_update(kf_predict(t), {2, 0, 10, 10});
  const auto d2 = velocity_direction(t, 2);
  REQUIRE(d2.has_value());
  CHECK((*d2)[0] == doctest::Approx(1.0));
  CHECK((*d2)[1] == doctest::Approx(0.0));

  KalmanTrack u = kf_init({0, 0, 10, 10}, 2);
  u = kf_update(kf_predict(u), {0, 0, 10, 10});
  u = kf_update(kf_predict(u), {0, 3, 10, 10});
  const auto d1 = velocity_direction(u, 1);
  REQUIRE(d1.has_value());
  CHECK((*d1)[0] == doctest::Approx(0.0));
  CHECK((*d1)[1] == doctest::Approx(1.0));

  // Coincident centers give no direction.
  KalmanTrack v = kf_init({0, 0, 10, 10}, 3);
  v = kf_update(kf_predict(v), {5, 5, 10, 10});
  v = kf_update(kf_predict(v), {5, 5, 10, 10});
  CHECK_FALSE(velocity_direction(v, 1).has_value());
}
