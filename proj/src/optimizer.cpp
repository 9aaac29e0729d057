#include "mvsc/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "kernels.hpp"

namespace mvsc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_projections(const ModelState& state) {
  if (!state.projections_ready()) {
    throw ValidationError("projection stacks are pending; run update_projections first");
  }
}

/// W_1^(v) ... W_delta^(v), the full descent map of one view (d_v x k).
Matrix stack_product(const std::vector<Matrix>& stack) {
  Matrix prod = stack.front();
  for (size_t i = 1; i < stack.size(); ++i) prod = prod * stack[i];
  return prod;
}

void seed_pending_layers(ModelState& state) {
  state.W.resize(state.schedule.per_view.size());
  for (size_t v = 0; v < state.W.size(); ++v) {
    const auto& widths = state.schedule.per_view[v];
    auto& stack = state.W[v];
    stack.resize(static_cast<size_t>(state.delta));
    for (int i = 0; i < state.delta; ++i) {
      stack[static_cast<size_t>(i)] = Matrix::Identity(widths[static_cast<size_t>(i)],
                                                        widths[static_cast<size_t>(i) + 1]);
    }
  }
}

}  // namespace

Vector reconstruction_losses(const ModelState& state, const MultiViewDataset& ds) {
  require_projections(state);
  Vector f(state.view_count());
  for (int v = 0; v < state.view_count(); ++v) {
    const Matrix P = stack_product(state.W[static_cast<size_t>(v)]) * state.A;
    f(v) = detail::chunked_residual(ds.views[static_cast<size_t>(v)], P, state.Z);
  }
  return f;
}

double objective(const ModelState& state, const MultiViewDataset& ds) {
  const Vector f = reconstruction_losses(state, ds);
  double total = 0.0;
  for (int v = 0; v < state.view_count(); ++v) {
    total += state.alpha(v) * state.alpha(v) * f(v);
  }
  return total;
}

Matrix procrustes_factor(const Matrix& M) {
  if (M.size() == 0) throw ValidationError("Procrustes input is empty");
  if (!M.allFinite()) throw NumericError("Procrustes input has non-finite entries");
  if (M.isZero(0.0)) return Matrix();
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("SVD failed to converge in Procrustes update");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

void update_projections(ModelState& state, const MultiViewDataset& ds) {
  if (!state.projections_ready()) seed_pending_layers(state);

  for (int v = 0; v < state.view_count(); ++v) {
    auto& stack = state.W[static_cast<size_t>(v)];

    // Suffix products A_hat[i] = W_{i+1} ... W_{delta-1} A, built from the
    // pre-pass layers: updating layer i never involves layers before i+1.
    std::vector<Matrix> suffix(static_cast<size_t>(state.delta));
    suffix.back() = state.A;
    for (int i = state.delta - 2; i >= 0; --i) {
      suffix[static_cast<size_t>(i)].noalias() =
          stack[static_cast<size_t>(i) + 1] * suffix[static_cast<size_t>(i) + 1];
    }

    // C starts as X Zᵀ and absorbs each freshly updated layer, so at layer i
    // it equals (W_1 ... W_{i-1})ᵀ X Zᵀ with the post-update prefix.
    Matrix C = detail::chunked_cross(ds.views[static_cast<size_t>(v)], state.Z);
    for (int i = 0; i < state.delta; ++i) {
      const Matrix M = C * suffix[static_cast<size_t>(i)].transpose();
      Matrix w = procrustes_factor(M);
      if (w.size() == 0) {
        warn("projection update: view " + std::to_string(v) + " layer " + std::to_string(i) +
             " has zero cross-covariance; keeping previous layer");
      } else {
        stack[static_cast<size_t>(i)] = std::move(w);
      }
      C = stack[static_cast<size_t>(i)].transpose() * C;
    }
  }
}

void update_anchors(ModelState& state, const MultiViewDataset& ds) {
  require_projections(state);
  Matrix phi = Matrix::Zero(state.k, state.m);
  for (int v = 0; v < state.view_count(); ++v) {
    const Matrix cross = detail::chunked_cross(ds.views[static_cast<size_t>(v)], state.Z);
    const double w2 = state.alpha(v) * state.alpha(v);
    phi.noalias() +=
        w2 * (stack_product(state.W[static_cast<size_t>(v)]).transpose() * cross);
  }
  Matrix a = procrustes_factor(phi);
  if (a.size() == 0) {
    warn("anchor update: zero cross-covariance; keeping previous anchors");
    return;
  }
  state.A = std::move(a);
}

Vector project_to_simplex(const Vector& y) {
  if (!y.allFinite()) throw ValidationError("simplex projection input has non-finite entries");
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  for (size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  Vector z = (y.array() - tau).max(0.0);
  return z;
}

void update_graph(ModelState& state, const MultiViewDataset& ds) {
  require_projections(state);
  const double scale = state.alpha.squaredNorm();
  if (!(scale > 0.0)) throw NumericError("graph update: all view weights are zero");

  std::vector<Matrix> P(static_cast<size_t>(state.view_count()));
  for (int v = 0; v < state.view_count(); ++v) {
    P[static_cast<size_t>(v)] = stack_product(state.W[static_cast<size_t>(v)]) * state.A;
  }

  // Per-column quadratic programs share the quadratic term scale * I, so
  // each column is the simplex projection of its weighted back-projection.
  // Columns are independent; every chunk writes only its own columns.
  detail::run_chunks(ds.sample_count(), detail::kColumnChunk,
                     [&](Index /*chunk*/, Index begin, Index end) {
                       const Index len = end - begin;
                       Matrix g = Matrix::Zero(state.m, len);
                       for (int v = 0; v < state.view_count(); ++v) {
                         const double w2 = state.alpha(v) * state.alpha(v);
                         g.noalias() +=
                             w2 * (P[static_cast<size_t>(v)].transpose() *
                                   ds.views[static_cast<size_t>(v)].middleCols(begin, len));
                       }
                       for (Index j = 0; j < len; ++j) {
                         state.Z.col(begin + j) = project_to_simplex(g.col(j) / scale);
                       }
                     });
}

Vector weights_from_losses(const Vector& f) {
  if (f.size() == 0) throw ValidationError("weight update needs at least one loss");
  if (!f.allFinite()) throw NumericError("weight update: non-finite losses");
  if (f.minCoeff() < 0.0) throw ValidationError("weight update: negative loss");

  Vector alpha = Vector::Zero(f.size());
  Index zero_count = 0;
  for (Index v = 0; v < f.size(); ++v) {
    if (f(v) == 0.0) ++zero_count;
  }
  if (zero_count > 0) {
    // Limit of the inverse-loss formula: perfectly reconstructed views take
    // all the weight, split evenly.
    for (Index v = 0; v < f.size(); ++v) {
      if (f(v) == 0.0) alpha(v) = 1.0 / static_cast<double>(zero_count);
    }
    return alpha;
  }
  // alpha_v proportional to 1/f_v, computed through ratios against the
  // smallest loss so tiny losses cannot overflow the reciprocal.
  const double fmin = f.minCoeff();
  double total = 0.0;
  for (Index v = 0; v < f.size(); ++v) total += fmin / f(v);
  for (Index v = 0; v < f.size(); ++v) alpha(v) = (fmin / f(v)) / total;
  return alpha;
}

void update_weights(ModelState& state, const MultiViewDataset& ds) {
  state.alpha = weights_from_losses(reconstruction_losses(state, ds));
}

std::pair<ModelState, FitReport> fit(const MultiViewDataset& ds, Index k, Index m, int delta,
                                     const FitConfig& cfg) {
  if (cfg.max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(cfg.rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");

  ModelState state = initialize(ds, k, m, delta);
  FitReport report;

  using Step = void (*)(ModelState&, const MultiViewDataset&);
  constexpr std::array<Step, 4> steps{update_projections, update_anchors, update_graph,
                                      update_weights};
  constexpr std::array<const char*, 4> step_names{"projections", "anchors", "graph",
                                                  "weights"};

  // A purely relative stall test can never fire once the objective reaches
  // floating-point zero (noiseless data): successive values are denormal-scale
  // noise whose relative change stays large. Treat anything this far below
  // the data's own energy as an exact fit.
  double data_scale = 0.0;
  for (const Matrix& x : ds.views) data_scale += x.squaredNorm();
  const double zero_floor = 1e-14 * data_scale;

  double previous = 0.0;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    for (size_t s = 0; s < steps.size(); ++s) {
      const auto start = Clock::now();
      try {
        steps[s](state, ds);
      } catch (const std::exception& e) {
        throw FitError("iteration " + std::to_string(t) + ", " + step_names[s] +
                           " update: " + e.what(),
                       report);
      }
      report.per_step_seconds[s] += seconds_since(start);
      if (cfg.record_trace) {
        report.substeps.push_back({t, step_names[s], objective(state, ds)});
      }
    }

    const double obj =
        cfg.record_trace ? report.substeps.back().objective : objective(state, ds);
    if (!std::isfinite(obj)) {
      throw FitError("objective became non-finite at iteration " + std::to_string(t), report);
    }
    report.objective_trace.push_back(obj);
    report.iterations = t;

    // First comparison happens at t = 2: the initial graph is infeasible, so
    // iteration 1 only establishes the baseline.
    if (t >= 2 && (std::abs(obj - previous) <= cfg.rel_tol * std::abs(previous) ||
                   obj <= zero_floor)) {
      report.converged = true;
      break;
    }
    previous = obj;
  }
  return {std::move(state), std::move(report)};
}

void write_trace(const FitReport& report, std::ostream& out) {
  out.precision(17);
  for (const SubstepRecord& rec : report.substeps) {
    out << "iter=" << rec.iteration << " step=" << rec.step << " objective=" << rec.objective
        << '\n';
  }
}

}  // namespace mvsc
