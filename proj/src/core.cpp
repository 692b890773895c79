#include "crtrack/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crtrack {

bool BoundingBox::valid() const {
  return std::isfinite(x_left) && std::isfinite(y_top) && std::isfinite(width) &&
         std::isfinite(height) && width > 0.0 && height > 0.0;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.right(), b.right()) - std::max(a.x_left, b.x_left);
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.y_top, b.y_top);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

double center_distance(const BoundingBox& a, const BoundingBox& b) {
  const double dx = a.center_x() - b.center_x();
  const double dy = a.center_y() - b.center_y();
  return std::sqrt(dx * dx + dy * dy);
}

CenterForm box_to_center(const BoundingBox& box) {
  return {box.center_x(), box.center_y(), box.area(), box.width / box.height};
}

BoundingBox center_to_box(const CenterForm& c) {
  if (!(c.area > 0.0) || !(c.aspect > 0.0))
    throw std::invalid_argument("center_to_box: area and aspect must be positive");
  const double w = std::sqrt(c.area * c.aspect);
  const double h = c.area / w;
  return {c.cx - 0.5 * w, c.cy - 0.5 * h, w, h};
}

double cosine_similarity(const EmbeddingVec& a, const EmbeddingVec& b) {
  if (a.dim() != b.dim() || a.dim() == 0)
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na <= 1e-24 || nb <= 1e-24)
    throw std::invalid_argument("cosine_similarity: zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace crtrack
