#include "mvsc/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace mvsc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

std::string layer_filename(int view, int layer) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "W_v%02d_l%02d.csv", view, layer);
  return buf;
}

double orthonormality_defect(const Matrix& w) {
  return (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<Index> build_schedule(Index d_v, Index k, int delta) {
  if (delta < 1) fail("depth must be at least 1, got " + std::to_string(delta));
  if (k < 1) fail("target width must be positive, got " + std::to_string(k));
  if (d_v < k) {
    fail("view dimension " + std::to_string(d_v) + " is below target width " +
         std::to_string(k));
  }
  std::vector<Index> widths(static_cast<size_t>(delta) + 1);
  const double span = static_cast<double>(d_v - k);
  for (int i = 0; i <= delta; ++i) {
    widths[static_cast<size_t>(i)] =
        d_v - static_cast<Index>(std::llround(static_cast<double>(i) * span / delta));
  }
  widths.front() = d_v;
  widths.back() = k;
  return widths;
}

ModelState initialize(const MultiViewDataset& ds, Index k, Index m, int delta) {
  validate(ds);
  const Index n = ds.sample_count();
  if (k < 1) fail("cluster count must be positive, got " + std::to_string(k));
  if (m < 1) fail("anchor count must be positive, got " + std::to_string(m));
  if (m > k) {
    fail("anchor count " + std::to_string(m) + " exceeds cluster count " + std::to_string(k) +
         "; anchors live in the k-dimensional latent space");
  }
  if (m > n) fail("anchor count " + std::to_string(m) + " exceeds sample count");
  if (delta < 1) fail("depth must be at least 1, got " + std::to_string(delta));
  if (ds.min_view_dim() < k) {
    fail("every view dimension must be at least the cluster count " + std::to_string(k) +
         ", smallest is " + std::to_string(ds.min_view_dim()));
  }

  ModelState state;
  state.k = k;
  state.m = m;
  state.delta = delta;
  state.schedule.per_view.reserve(static_cast<size_t>(ds.view_count()));
  for (int v = 0; v < ds.view_count(); ++v) {
    state.schedule.per_view.push_back(build_schedule(ds.view_dim(v), k, delta));
  }

  // Z = [I_m | 0]: anchor j claims sample j, remaining columns start empty.
  // The zero columns break the unit-sum constraint until the first graph
  // update; fit() orders its sweep so that update runs before the objective
  // is ever compared across iterations.
  state.Z = Matrix::Zero(m, n);
  state.Z.leftCols(m).setIdentity();

  state.A = Matrix::Zero(k, m);
  state.A.topRows(m).setIdentity();

  state.alpha = Vector::Constant(ds.view_count(), 1.0 / ds.view_count());
  return state;
}

void validate(const ModelState& state, double tol) {
  if (state.k < 1 || state.m < 1 || state.delta < 1) {
    fail("model state has non-positive k, m or delta");
  }
  if (state.A.rows() != state.k || state.A.cols() != state.m) {
    fail("anchor matrix is " + std::to_string(state.A.rows()) + "x" +
         std::to_string(state.A.cols()) + ", expected " + std::to_string(state.k) + "x" +
         std::to_string(state.m));
  }
  if (orthonormality_defect(state.A) > tol) {
    fail("anchor matrix columns are not orthonormal");
  }
  if (state.Z.rows() != state.m) fail("graph row count does not match anchor count");
  if (state.Z.minCoeff() < -tol) fail("graph has negative entries");
  for (Index c = 0; c < state.Z.cols(); ++c) {
    if (std::abs(state.Z.col(c).sum() - 1.0) > tol) {
      fail("graph column " + std::to_string(c) + " does not sum to 1");
    }
  }
  if (static_cast<int>(state.alpha.size()) != state.view_count()) {
    fail("weight count does not match view count");
  }
  if (state.alpha.minCoeff() < -tol) fail("view weights have negative entries");
  if (std::abs(state.alpha.sum() - 1.0) > tol) fail("view weights do not sum to 1");

  if (state.projections_ready()) {
    if (static_cast<int>(state.W.size()) != state.view_count()) {
      fail("projection stack count does not match view count");
    }
    for (int v = 0; v < state.view_count(); ++v) {
      const auto& stack = state.W[static_cast<size_t>(v)];
      const auto& widths = state.schedule.per_view[static_cast<size_t>(v)];
      if (static_cast<int>(stack.size()) != state.delta) {
        fail("view " + std::to_string(v) + " projection stack has wrong depth");
      }
      for (int i = 0; i < state.delta; ++i) {
        const Matrix& w = stack[static_cast<size_t>(i)];
        if (w.rows() != widths[static_cast<size_t>(i)] ||
            w.cols() != widths[static_cast<size_t>(i) + 1]) {
          fail("view " + std::to_string(v) + " layer " + std::to_string(i) +
               " has unexpected shape");
        }
        if (orthonormality_defect(w) > tol) {
          fail("view " + std::to_string(v) + " layer " + std::to_string(i) +
               " columns are not orthonormal");
        }
      }
    }
  }
}

void save_state(const ModelState& state, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  json manifest;
  manifest["k"] = state.k;
  manifest["m"] = state.m;
  manifest["delta"] = state.delta;
  manifest["schedule"] = json::array();
  for (const auto& widths : state.schedule.per_view) manifest["schedule"].push_back(widths);
  manifest["alpha"] = std::vector<double>(state.alpha.data(),
                                          state.alpha.data() + state.alpha.size());
  manifest["projections_ready"] = state.projections_ready();
  std::ofstream out(dir / "state.json", std::ios::trunc);
  if (!out) fail("cannot write " + (dir / "state.json").string());
  out << manifest.dump(2) << '\n';

  write_matrix_csv(dir / "A.csv", state.A);
  write_matrix_csv(dir / "Z.csv", state.Z);
  if (state.projections_ready()) {
    for (size_t v = 0; v < state.W.size(); ++v) {
      for (size_t i = 0; i < state.W[v].size(); ++i) {
        write_matrix_csv(dir / layer_filename(static_cast<int>(v), static_cast<int>(i)),
                         state.W[v][i]);
      }
    }
  }
}

ModelState load_state(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "state.json";
  std::ifstream in(manifest_path);
  if (!in) fail("cannot open " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    fail(manifest_path.string() + ": " + e.what());
  }

  ModelState state;
  try {
    state.k = manifest.at("k").get<Index>();
    state.m = manifest.at("m").get<Index>();
    state.delta = manifest.at("delta").get<int>();
    for (const auto& widths : manifest.at("schedule")) {
      state.schedule.per_view.push_back(widths.get<std::vector<Index>>());
    }
    const auto alpha = manifest.at("alpha").get<std::vector<double>>();
    state.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
  } catch (const json::exception& e) {
    fail(manifest_path.string() + ": " + e.what());
  }

  state.A = read_matrix_csv(dir / "A.csv");
  state.Z = read_matrix_csv(dir / "Z.csv");
  if (manifest.value("projections_ready", false)) {
    state.W.resize(state.schedule.per_view.size());
    for (size_t v = 0; v < state.W.size(); ++v) {
      state.W[v].resize(static_cast<size_t>(state.delta));
      for (int i = 0; i < state.delta; ++i) {
        state.W[v][static_cast<size_t>(i)] =
            read_matrix_csv(dir / layer_filename(static_cast<int>(v), i));
      }
    }
  }
  validate(state);
  return state;
}

}  // namespace mvsc
