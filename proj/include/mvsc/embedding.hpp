#pragma once

#include <cstdint>
#include <vector>

#include "mvsc/common.hpp"

namespace mvsc {

struct SpectralEmbedding {
  Matrix coords;           ///< n x k, orthonormal columns, one row per sample
  Vector singular_values;  ///< length k, non-increasing
};

/// Top-k right singular vectors of the bipartite graph, the spectral
/// embedding implied by the anchor-sample similarity. With degree_normalize
/// the graph rows are scaled by inverse square-root anchor degrees first.
/// Right vectors are recovered from the m x m Gram matrix, so cost is O(nm^2)
/// and no n x n array is ever formed. Zero-degree anchor rows are dropped
/// with a warning; if the rank falls short of k, the embedding is padded with
/// orthonormal complement columns (singular value 0) and a warning.
SpectralEmbedding spectral_embedding(const Matrix& Z, Index k, bool degree_normalize = true);

struct ClusterResult {
  std::vector<int> assignments;  ///< length n, values 0..k-1
  Matrix centers;                ///< k x dim, one center per row
  double inertia = 0.0;
};

/// Lloyd iterations with greedy kmeans++ seeding, best of `restarts` by
/// (inertia, restart index). Deterministic for a fixed seed regardless of the
/// thread cap. If inertia_trace is given it receives the winning restart's
/// inertia after each Lloyd pass.
ClusterResult kmeans(const SpectralEmbedding& emb, Index k, std::uint64_t seed,
                     int restarts = 10, std::vector<double>* inertia_trace = nullptr);

}  // namespace mvsc
