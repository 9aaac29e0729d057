#pragma once

#include <vector>

#include "mvsc/common.hpp"
#include "parallel.hpp"

namespace mvsc::detail {

/// X * Yᵀ for column-aligned X (a x n) and Y (b x n), accumulated over the
/// fixed column-chunk grid in index order. Bit-stable for any thread cap.
inline Matrix chunked_cross(const Matrix& X, const Matrix& Y) {
  const Index n = X.cols();
  const Index nchunks = chunk_count(n, kColumnChunk);
  std::vector<Matrix> partial(static_cast<size_t>(nchunks));
  run_chunks(n, kColumnChunk, [&](Index c, Index begin, Index end) {
    partial[static_cast<size_t>(c)].noalias() =
        X.middleCols(begin, end - begin) * Y.middleCols(begin, end - begin).transpose();
  });
  Matrix out = Matrix::Zero(X.rows(), Y.rows());
  for (const Matrix& p : partial) out += p;
  return out;
}

/// ||X - P * Z||_F² over the same fixed chunk grid, reduced in index order.
inline double chunked_residual(const Matrix& X, const Matrix& P, const Matrix& Z) {
  const Index n = X.cols();
  const Index nchunks = chunk_count(n, kColumnChunk);
  std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);
  run_chunks(n, kColumnChunk, [&](Index c, Index begin, Index end) {
    partial[static_cast<size_t>(c)] =
        (X.middleCols(begin, end - begin) - P * Z.middleCols(begin, end - begin))
            .squaredNorm();
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace mvsc::detail
