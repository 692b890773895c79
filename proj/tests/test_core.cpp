#include <cmath>
#include <limits>
#include <stdexcept>

#include "crtrack/core.hpp"
#include "crtrack/rng.hpp"
#include "doctest.h"

using namespace crtrack;

namespace {

BoundingBox random_box(rng::Stream& st) {
  return {st.uniform(-50.0, 400.0), st.uniform(-50.0, 400.0), st.uniform(1.0, 120.0),
          st.uniform(1.0, 120.0)};
}

}  // namespace

TEST_CASE("iou on identical, disjoint and half-overlapping boxes") {
  const BoundingBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, {20, 20, 5, 5}) == doctest::Approx(0.0));
  // Intersection 50, union 150.
  CHECK(iou(a, {5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("iou is symmetric, bounded, and 1 on self") {
  rng::Stream st(101);
  for (int it = 0; it < 500; ++it) {
    const BoundingBox a = random_box(st);
    const BoundingBox b = random_box(st);
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(iou(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("center_distance basics") {
  const BoundingBox a{0, 0, 10, 10};
  CHECK(center_distance(a, a) == doctest::Approx(0.0));
  CHECK(center_distance(a, {3, 4, 10, 10}) == doctest::Approx(5.0));
  CHECK(center_distance({0, 0, 2, 2}, {10, 0, 2, 2}) == doctest::Approx(10.0));
}

TEST_CASE("center_distance satisfies the triangle inequality") {
  rng::Stream st(202);
  for (int it = 0; it < 500; ++it) {
    const BoundingBox a = random_box(st);
    const BoundingBox b = random_box(st);
    const BoundingBox c = random_box(st);
    CHECK(center_distance(a, c) <=
          center_distance(a, b) + center_distance(b, c) + 1e-9);
  }
}

TEST_CASE("box center-form conversion and inverse") {
  const CenterForm c = box_to_center({0, 0, 10, 20});
  CHECK(c.cx == doctest::Approx(5.0));
  CHECK(c.cy == doctest::Approx(10.0));
  CHECK(c.area == doctest::Approx(200.0));
  CHECK(c.aspect == doctest::Approx(0.5));

  const BoundingBox rt = center_to_box(box_to_center({3, 7, 11, 13}));
  CHECK(rt.x_left == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(rt.y_top == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(rt.width == doctest::Approx(11.0).epsilon(1e-9));
  CHECK(rt.height == doctest::Approx(13.0).epsilon(1e-9));

  CHECK_THROWS_AS(center_to_box({5, 5, -1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(center_to_box({5, 5, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("conversion round-trips random boxes within 1e-9") {
  rng::Stream st(303);
  for (int it = 0; it < 500; ++it) {
    const BoundingBox b = random_box(st);
    const BoundingBox rt = center_to_box(box_to_center(b));
    CHECK(std::abs(rt.x_left - b.x_left) < 1e-9);
    CHECK(std::abs(rt.y_top - b.y_top) < 1e-9);
    CHECK(std::abs(rt.width - b.width) < 1e-9);
    CHECK(std::abs(rt.height - b.height) < 1e-9);
  }
}

TEST_CASE("box validity rejects degenerate and non-finite boxes") {
  CHECK(BoundingBox{0, 0, 1, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, 0, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, 1, -2}.valid());
  CHECK_FALSE(BoundingBox{std::nan(""), 0, 1, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, std::numeric_limits<double>::infinity(), 1}.valid());
}

TEST_CASE("cosine_similarity rejects mismatched and zero-norm inputs") {
  const EmbeddingVec a{{1.0, 0.0}};
  const EmbeddingVec b{{0.0, 1.0}};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cosine_similarity(a, EmbeddingVec{{1.0, 0.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cosine_similarity(a, EmbeddingVec{{0.0, 0.0}}), std::invalid_argument);
}
