#include "crtrack/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crtrack::kernels {

Matrix iou_matrix_serial(const std::vector<BoundingBox>& a,
                         const std::vector<BoundingBox>& b) {
  Matrix out(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) = iou(a[i], b[j]);
  return out;
}

Matrix iou_matrix(const std::vector<BoundingBox>& a, const std::vector<BoundingBox>& b,
                  Exec exec) {
  if (exec == Exec::serial) return iou_matrix_serial(a, b);
  Matrix out(static_cast<int>(a.size()), static_cast<int>(b.size()));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) = iou(a[i], b[j]);
  return out;
}

namespace {

double norm_checked(const EmbeddingVec& v) {
  if (v.dim() == 0) throw std::invalid_argument("bank_max_cosine: empty embedding");
  double n = 0.0;
  for (double x : v.values) n += x * x;
  if (n <= 1e-24) throw std::invalid_argument("bank_max_cosine: zero-norm embedding");
  return std::sqrt(n);
}

double dot(const EmbeddingVec& a, const EmbeddingVec& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("bank_max_cosine: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d += a.values[i] * b.values[i];
  return d;
}

}  // namespace

Matrix bank_max_cosine_serial(const std::vector<EmbeddingVec>& queries,
                              const std::vector<std::vector<EmbeddingVec>>& galleries) {
  Matrix out(static_cast<int>(queries.size()), static_cast<int>(galleries.size()), -1.0);
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) {
      double best = -1.0;
      for (const auto& g : galleries[j]) {
        const double c = dot(queries[i], g) / (norm_checked(queries[i]) * norm_checked(g));
        best = std::max(best, c);
      }
      if (!galleries[j].empty()) out.at(i, j) = best;
    }
  return out;
}

Matrix bank_max_cosine(const std::vector<EmbeddingVec>& queries,
                       const std::vector<std::vector<EmbeddingVec>>& galleries,
                       Exec exec) {
  if (exec == Exec::serial) return bank_max_cosine_serial(queries, galleries);
  // Norms are validated serially so an exception cannot escape the parallel
  // region; the pairwise arithmetic below matches the serial path exactly.
  std::vector<double> qn(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) qn[i] = norm_checked(queries[i]);
  std::vector<std::vector<double>> gn(galleries.size());
  for (std::size_t j = 0; j < galleries.size(); ++j) {
    gn[j].reserve(galleries[j].size());
    for (const auto& g : galleries[j]) gn[j].push_back(norm_checked(g));
  }
  for (const auto& gallery : galleries)
    for (const auto& g : gallery)
      if (!queries.empty() && g.dim() != queries.front().dim())
        throw std::invalid_argument("bank_max_cosine: dimension mismatch");

  Matrix out(static_cast<int>(queries.size()), static_cast<int>(galleries.size()), -1.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) {
      double best = -1.0;
      for (std::size_t k = 0; k < galleries[j].size(); ++k) {
        const double c = dot(queries[i], galleries[j][k]) / (qn[i] * gn[j][k]);
        best = std::max(best, c);
      }
      if (!galleries[j].empty()) out.at(i, j) = best;
    }
  return out;
}

}  // namespace crtrack::kernels
