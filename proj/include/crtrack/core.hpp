#pragma once

#include <optional>
#include <vector>

namespace crtrack {

// Axis-aligned box in pixel coordinates, top-left origin.
struct BoundingBox {
  double x_left = 0.0;
  double y_top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return x_left + width; }
  double bottom() const { return y_top + height; }
  double center_x() const { return x_left + 0.5 * width; }
  double center_y() const { return y_top + 0.5 * height; }
  double area() const { return width * height; }
  bool valid() const;
};

// (cx, cy, area, aspect) form used by the motion model; aspect = width/height.
struct CenterForm {
  double cx = 0.0;
  double cy = 0.0;
  double area = 0.0;
  double aspect = 0.0;
};

struct EmbeddingVec {
  std::vector<double> values;

  EmbeddingVec() = default;
  explicit EmbeddingVec(std::vector<double> v) : values(std::move(v)) {}
  std::size_t dim() const { return values.size(); }
};

struct Detection {
  int frame = 0;
  BoundingBox box;
  double score = 0.0;
  std::optional<EmbeddingVec> embedding;
};

// Raw detector output before pseudo-label filtering.
struct Prediction {
  BoundingBox box;
  double class_prob = 0.0;
  double objectness = 0.0;

  double score() const { return class_prob * objectness; }
};

struct PseudoBox {
  BoundingBox box;
  double confidence = 0.0;
};

double iou(const BoundingBox& a, const BoundingBox& b);
double center_distance(const BoundingBox& a, const BoundingBox& b);

CenterForm box_to_center(const BoundingBox& box);
// Throws std::invalid_argument when area or aspect is not positive.
BoundingBox center_to_box(const CenterForm& c);

double cosine_similarity(const EmbeddingVec& a, const EmbeddingVec& b);

}  // namespace crtrack
