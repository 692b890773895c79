#pragma once

#include <vector>

#include "crtrack/core.hpp"
#include "crtrack/matrix.hpp"
#include "crtrack/parallel.hpp"

namespace crtrack::kernels {

// All-pairs IoU, rows = a, cols = b.
Matrix iou_matrix(const std::vector<BoundingBox>& a, const std::vector<BoundingBox>& b,
                  Exec exec = Exec::parallel);
Matrix iou_matrix_serial(const std::vector<BoundingBox>& a,
                         const std::vector<BoundingBox>& b);

// Raw max cosine similarity between each query embedding and the members of
// each gallery; an empty gallery yields -1. Throws on zero-norm input.
Matrix bank_max_cosine(const std::vector<EmbeddingVec>& queries,
                       const std::vector<std::vector<EmbeddingVec>>& galleries,
                       Exec exec = Exec::parallel);
Matrix bank_max_cosine_serial(const std::vector<EmbeddingVec>& queries,
                              const std::vector<std::vector<EmbeddingVec>>& galleries);

}  // namespace crtrack::kernels
