#include "mvsc/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "kernels.hpp"
#include "rng.hpp"

namespace mvsc {

namespace {

/// Flips each column so its entry of largest magnitude (lowest index on
/// ties) is positive, making the eigenvector sign choice reproducible.
void fix_column_signs(Matrix& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    Index lead = 0;
    m.col(c).cwiseAbs().maxCoeff(&lead);
    if (m(lead, c) < 0.0) m.col(c) = -m.col(c);
  }
}

/// Appends `extra` columns orthonormal to V, chosen deterministically: each
/// round takes the canonical basis vector with the largest residual against
/// the current columns (lowest index on ties) and orthogonalizes it twice.
void pad_with_complement(Matrix& V, Index extra) {
  const Index n = V.rows();
  for (Index added = 0; added < extra; ++added) {
    const Index r = V.cols();
    Index best = 0;
    double best_residual = -1.0;
    for (Index j = 0; j < n; ++j) {
      const double residual = 1.0 - V.row(j).squaredNorm();
      if (residual > best_residual + 1e-15) {
        best_residual = residual;
        best = j;
      }
    }
    Vector w = Vector::Zero(n);
    w(best) = 1.0;
    for (int pass = 0; pass < 2; ++pass) w -= V * (V.transpose() * w);
    const double norm = w.norm();
    if (!(norm > 0.0)) throw NumericError("cannot extend embedding to an orthonormal basis");
    w /= norm;
    V.conservativeResize(n, r + 1);
    V.col(r) = w;
  }
}

}  // namespace

SpectralEmbedding spectral_embedding(const Matrix& Z, Index k, bool degree_normalize) {
  const Index m = Z.rows();
  const Index n = Z.cols();
  if (m < 1 || n < 1) throw ValidationError("graph matrix is empty");
  if (!Z.allFinite()) throw ValidationError("graph matrix has non-finite entries");
  if (k < 1) throw ValidationError("embedding dimension must be positive");
  if (k > m) {
    throw ValidationError("embedding dimension " + std::to_string(k) +
                          " exceeds anchor count " + std::to_string(m));
  }
  if (k > n) {
    throw ValidationError("embedding dimension " + std::to_string(k) +
                          " exceeds sample count " + std::to_string(n));
  }

  // Drop anchors no sample is attached to; their rows carry no information
  // and break degree normalization.
  std::vector<Index> kept;
  kept.reserve(static_cast<size_t>(m));
  for (Index r = 0; r < m; ++r) {
    if (Z.row(r).cwiseAbs().sum() > 0.0) kept.push_back(r);
  }
  if (kept.empty()) throw ValidationError("graph matrix is entirely zero");
  if (static_cast<Index>(kept.size()) < m) {
    warn("spectral embedding: dropped " + std::to_string(m - kept.size()) +
         " zero-degree anchor row(s)");
  }

  Matrix zhat(static_cast<Index>(kept.size()), n);
  for (size_t r = 0; r < kept.size(); ++r) {
    if (degree_normalize) {
      const double degree = Z.row(kept[r]).sum();
      if (!(degree > 0.0)) {
        throw NumericError("spectral embedding: non-positive anchor degree");
      }
      zhat.row(static_cast<Index>(r)) = Z.row(kept[r]) / std::sqrt(degree);
    } else {
      zhat.row(static_cast<Index>(r)) = Z.row(kept[r]);
    }
  }

  // Right singular vectors via the anchor-side Gram matrix: eigenpairs
  // (u, lambda) of Zhat Zhatᵀ give v = Zhatᵀ u / sqrt(lambda). Everything
  // stays O(n m²); no n x n matrix is formed.
  const Matrix gram = detail::chunked_cross(zhat, zhat);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw NumericError("eigendecomposition of the anchor Gram matrix failed");
  }

  const Index mk = static_cast<Index>(kept.size());
  Vector sigma(k);
  sigma.setZero();
  const double sigma_max = std::sqrt(std::max(eig.eigenvalues()(mk - 1), 0.0));
  // Gram eigenvalues of rank-deficient directions carry O(eps * lambda_max)
  // noise, so sqrt leaves ~1e-8 relative residue; cut an order above it.
  const double rank_tol = 1e-7 * sigma_max;

  Index rank = 0;
  Matrix coords(n, 0);
  for (Index i = 0; i < k; ++i) {
    const double s = std::sqrt(std::max(eig.eigenvalues()(mk - 1 - i), 0.0));
    if (s <= rank_tol) break;
    sigma(i) = s;
    coords.conservativeResize(n, i + 1);
    coords.col(i) = zhat.transpose() * eig.eigenvectors().col(mk - 1 - i) / s;
    ++rank;
  }
  if (rank == 0) throw NumericError("graph matrix has no usable spectrum");

  // Recovered vectors are orthonormal only up to the conditioning of the
  // kept spectrum; a thin QR polish restores machine-precision orthogonality
  // without leaving the spanned subspace.
  Eigen::HouseholderQR<Matrix> qr(coords);
  coords = qr.householderQ() * Matrix::Identity(n, rank);

  if (rank < k) {
    warn("spectral embedding: rank " + std::to_string(rank) + " below requested " +
         std::to_string(k) + "; padding with orthonormal complement");
    pad_with_complement(coords, k - rank);
  }
  fix_column_signs(coords);

  SpectralEmbedding emb;
  emb.coords = std::move(coords);
  emb.singular_values = std::move(sigma);
  return emb;
}

namespace {

struct LloydRun {
  std::vector<int> assignments;
  Matrix centers;
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> inertia_trace;
};

double assign_all(const Matrix& X, const Matrix& centers, std::vector<int>& out,
                  Vector& dist2) {
  const Index n = X.rows();
  const Index k = centers.rows();
  double inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (X.row(i) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < k; ++c) {
      const double d = (X.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<size_t>(i)] = best;
    dist2(i) = best_d;
    inertia += best_d;
  }
  return inertia;
}

Matrix seed_centers(const Matrix& X, Index k, std::mt19937_64& gen) {
  const Index n = X.rows();
  Matrix centers(k, X.cols());

  centers.row(0) = X.row(static_cast<Index>(detail::uniform_index(gen, static_cast<std::uint64_t>(n))));
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (X.row(i) - centers.row(0)).squaredNorm();

  const int candidates = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  for (Index t = 1; t < k; ++t) {
    const double total = d2.sum();
    Index chosen;
    if (total > 0.0) {
      // Greedy seeding: draw several D²-distributed candidates, keep the one
      // that shrinks the potential the most (first on ties).
      double best_potential = std::numeric_limits<double>::infinity();
      Index best_idx = 0;
      for (int c = 0; c < candidates; ++c) {
        const double r = detail::uniform01(gen) * total;
        double cum = 0.0;
        Index idx = n - 1;
        for (Index i = 0; i < n; ++i) {
          cum += d2(i);
          if (cum > r) {
            idx = i;
            break;
          }
        }
        double potential = 0.0;
        for (Index i = 0; i < n; ++i) {
          potential += std::min(d2(i), (X.row(i) - X.row(idx)).squaredNorm());
        }
        if (potential < best_potential) {
          best_potential = potential;
          best_idx = idx;
        }
      }
      chosen = best_idx;
    } else {
      // Every point coincides with a chosen center (fewer distinct points
      // than k); reuse points in index order so seeding never fails.
      chosen = t % n;
    }
    centers.row(t) = X.row(chosen);
    for (Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (X.row(i) - X.row(chosen)).squaredNorm());
    }
  }
  return centers;
}

LloydRun lloyd(const Matrix& X, Index k, std::uint64_t seed) {
  constexpr int kMaxIter = 300;
  constexpr double kMoveTol = 1e-6;
  const Index n = X.rows();
  const Index dim = X.cols();

  std::mt19937_64 gen(seed);
  LloydRun run;
  run.centers = seed_centers(X, k, gen);
  run.assignments.assign(static_cast<size_t>(n), 0);
  Vector d2(n);

  for (int it = 0; it < kMaxIter; ++it) {
    run.inertia = assign_all(X, run.centers, run.assignments, d2);
    run.inertia_trace.push_back(run.inertia);

    Matrix next = Matrix::Zero(k, dim);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Index i = 0; i < n; ++i) {
      next.row(run.assignments[static_cast<size_t>(i)]) += X.row(i);
      counts(run.assignments[static_cast<size_t>(i)]) += 1;
    }
    for (Index c = 0; c < k; ++c) {
      if (counts(c) > 0) {
        next.row(c) /= static_cast<double>(counts(c));
      } else {
        // Reseed an empty cluster on the point currently farthest from its
        // center (lowest index on ties); each empty cluster takes a distinct
        // point. Assigned points keep their centers, so inertia still cannot
        // increase on the next assignment pass.
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          if (d2(i) > far_d) {
            far_d = d2(i);
            far = i;
          }
        }
        next.row(c) = X.row(far);
        d2(far) = -1.0;
      }
    }

    double movement = 0.0;
    for (Index c = 0; c < k; ++c) {
      movement = std::max(movement, (next.row(c) - run.centers.row(c)).norm());
    }
    run.centers = next;
    if (movement < kMoveTol) break;
  }

  run.inertia = assign_all(X, run.centers, run.assignments, d2);
  return run;
}

}  // namespace

ClusterResult kmeans(const SpectralEmbedding& emb, Index k, std::uint64_t seed, int restarts,
                     std::vector<double>* inertia_trace) {
  const Index n = emb.coords.rows();
  if (k < 1) throw ValidationError("cluster count must be positive");
  if (n < k) {
    throw ValidationError("cluster count " + std::to_string(k) + " exceeds sample count " +
                          std::to_string(n));
  }
  if (restarts < 1) throw ValidationError("restart count must be positive");

  LloydRun best;
  for (int r = 0; r < restarts; ++r) {
    LloydRun run = lloyd(emb.coords, k, detail::substream_seed(seed, static_cast<std::uint64_t>(r)));
    if (run.inertia < best.inertia) best = std::move(run);
  }

  if (inertia_trace) *inertia_trace = best.inertia_trace;
  ClusterResult result;
  result.assignments = std::move(best.assignments);
  result.centers = std::move(best.centers);
  result.inertia = best.inertia;
  return result;
}

}  // namespace mvsc
