#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mvsc/model.hpp"

namespace mvsc {

struct FitConfig {
  int max_iter = 100;
  double rel_tol = 1e-3;
  /// Also evaluate and record the objective after every sub-step, not just
  /// after full sweeps. Costs one extra objective evaluation per sub-step.
  bool record_trace = false;
};

struct SubstepRecord {
  int iteration = 0;  ///< 1-based sweep index
  std::string step;   ///< "projections" | "anchors" | "graph" | "weights"
  double objective = 0.0;
};

struct FitReport {
  std::vector<double> objective_trace;  ///< one entry per completed sweep
  int iterations = 0;
  bool converged = false;
  /// Accumulated wall time per step: projections, anchors, graph, weights.
  std::array<double, 4> per_step_seconds{};
  std::vector<SubstepRecord> substeps;  ///< filled when record_trace is set
};

/// Thrown when a sub-step fails mid-fit; carries the progress made so far.
class FitError : public NumericError {
 public:
  FitError(const std::string& message, FitReport partial)
      : NumericError(message), partial_report(std::move(partial)) {}
  FitReport partial_report;
};

/// Weighted squared-Frobenius reconstruction loss
///   sum_v alpha_v^2 ||X^(v) - W_1^(v)...W_delta^(v) A Z||_F^2.
/// Requires the projection stacks to be set.
double objective(const ModelState& state, const MultiViewDataset& ds);

/// Per-view squared reconstruction losses (the unweighted summands above).
Vector reconstruction_losses(const ModelState& state, const MultiViewDataset& ds);

// Block updates of the alternating minimization. Each one is the exact
// minimizer of the objective over its block with the other blocks fixed, so
// the objective never increases across any sub-step once Z is feasible.

/// Updates every projection layer of every view in succession, deepest last.
/// Pending layers are first seeded with rectangular identities so the
/// sequential pass always has operands, then overwritten in order.
void update_projections(ModelState& state, const MultiViewDataset& ds);

/// Relocates the unified anchor matrix.
void update_anchors(ModelState& state, const MultiViewDataset& ds);

/// Rebuilds every bipartite-graph column. The per-column quadratic program
/// has an identity-scaled quadratic term, so it collapses to a Euclidean
/// simplex projection. Columns are independent and run data-parallel.
void update_graph(ModelState& state, const MultiViewDataset& ds);

/// Closed-form view weights from the per-view losses.
void update_weights(ModelState& state, const MultiViewDataset& ds);

/// Trace maximizer of Tr(M W^T) over matrices with orthonormal columns:
/// U V^T from the thin SVD of M (requires rows >= cols). Returns an empty
/// matrix when M is exactly zero, in which case every feasible W is optimal
/// and callers keep their previous iterate.
Matrix procrustes_factor(const Matrix& M);

/// Euclidean projection onto the probability simplex {z >= 0, sum z = 1}
/// by the sort-and-threshold method.
Vector project_to_simplex(const Vector& y);

/// Exact minimizer of sum_v alpha_v^2 f_v over the simplex:
/// alpha_v proportional to 1/f_v. Views with zero loss split all the weight.
Vector weights_from_losses(const Vector& f);

/// Runs initialize and sweeps projections -> anchors -> graph -> weights
/// until |obj_t - obj_{t-1}| <= rel_tol * |obj_{t-1}| or max_iter. An exact
/// fit also counts as converged: once the objective drops below 1e-14 of the
/// data's total squared norm it is floating-point noise around zero and the
/// relative test would never fire.
std::pair<ModelState, FitReport> fit(const MultiViewDataset& ds, Index k, Index m,
                                     int delta, const FitConfig& cfg = {});

/// Machine-parseable sub-step trace, one line per record:
/// `iter=<t> step=<name> objective=<value>`.
void write_trace(const FitReport& report, std::ostream& out);

}  // namespace mvsc
