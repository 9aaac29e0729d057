#pragma once

#include <filesystem>
#include <vector>

#include "mvsc/common.hpp"
#include "mvsc/dataset.hpp"

namespace mvsc {

/// Per-view layer widths of the projection stacks: entry v holds
/// [l_0, l_1, ..., l_delta] with l_0 = d_v, l_delta = k, non-increasing.
struct DimensionSchedule {
  std::vector<std::vector<Index>> per_view;
};

/// Slices [d_v .. k] into `delta` near-equal descent steps:
/// l_i = d_v - round(i * (d_v - k) / delta), rounding half up.
std::vector<Index> build_schedule(Index d_v, Index k, int delta);

/// Decision variables of the joint reconstruction objective.
///
///   W[v][i]  projection layer mapping l_i -> l_{i+1} widths (orthonormal columns)
///   A        k x m unified anchor matrix (orthonormal columns)
///   Z        m x n consensus bipartite graph (non-negative, unit column sums)
///   alpha    view weights on the unit simplex
///
/// W is empty until the first projection update runs; the optimizer fills it
/// on its first pass, so initialization stays free of randomness.
struct ModelState {
  std::vector<std::vector<Matrix>> W;
  Matrix A;
  Matrix Z;
  Vector alpha;
  Index k = 0;
  Index m = 0;
  int delta = 1;
  DimensionSchedule schedule;

  bool projections_ready() const { return !W.empty(); }
  int view_count() const { return static_cast<int>(schedule.per_view.size()); }
};

/// Deterministic starting point: Z = [I_m | 0], A = rectangular identity,
/// alpha uniform, W pending. Note the zero columns of Z violate the unit-sum
/// constraint until the first graph update projects every column back onto
/// the simplex.
ModelState initialize(const MultiViewDataset& ds, Index k, Index m, int delta);

/// Checks orthonormality and simplex invariants of a post-sweep state.
void validate(const ModelState& state, double tol = 1e-8);

/// State serialization: a directory of CSV matrices plus a manifest with
/// k, m, delta, the schedule and alpha. Enough to resume or inspect a fit.
void save_state(const ModelState& state, const std::filesystem::path& dir);
ModelState load_state(const std::filesystem::path& dir);

}  // namespace mvsc
