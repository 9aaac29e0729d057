#include <vector>

#include "doctest.h"
#include "mvsc/dataset.hpp"
#include "mvsc/embedding.hpp"
#include "mvsc/metrics.hpp"
#include "mvsc/optimizer.hpp"
#include "oracles.hpp"

using namespace mvsc;

namespace {

struct PipelineOutput {
  ModelState state;
  FitReport report;
  std::vector<int> assignments;
  MetricReport metrics;
};

PipelineOutput run_pipeline(const MultiViewDataset& ds, Index k, Index m, int delta,
                            std::uint64_t seed) {
  PipelineOutput out;
  std::tie(out.state, out.report) = fit(ds, k, m, delta);
  const SpectralEmbedding emb = spectral_embedding(out.state.Z, k);
  out.assignments = kmeans(emb, k, seed).assignments;
  if (ds.labels) out.metrics = evaluate(out.assignments, *ds.labels);
  return out;
}

MultiViewDataset noisy_fixture(Index n, int k_true, double noise, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n;
  spec.k_true = k_true;
  spec.p = 2;
  spec.dims = {20, 35};
  spec.noise_sigma = noise;
  spec.seed = seed;
  return normalize_views(generate_synthetic(spec), NormMode::zscore);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("library pipeline recovers planted clusters through noise") {
  const MultiViewDataset ds = noisy_fixture(300, 4, 0.1, 3);
  const PipelineOutput out = run_pipeline(ds, 4, 4, 2, 11);
  CHECK(out.report.converged);
  CHECK(out.metrics.acc >= 0.95);
  CHECK(out.metrics.nmi >= 0.90);
  CHECK(out.metrics.purity >= 0.95);
  // The learned partition also beats chance by the nearest-center yardstick.
  CHECK(out.metrics.acc >= oracles::nearest_center_accuracy(ds) - 0.05);
}

TEST_CASE("pipeline output is bit-identical across repeated runs") {
  const MultiViewDataset ds = noisy_fixture(250, 3, 0.15, 5);
  const PipelineOutput a = run_pipeline(ds, 3, 3, 2, 21);
  const PipelineOutput b = run_pipeline(ds, 3, 3, 2, 21);
  CHECK(a.assignments == b.assignments);
  CHECK((a.state.Z - b.state.Z).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.state.A - b.state.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.report.objective_trace == b.report.objective_trace);
  CHECK(a.report.iterations == b.report.iterations);
}

TEST_CASE("thread cap does not change a single bit of the result") {
  // Large enough that the column grid actually splits into several chunks.
  const MultiViewDataset ds = noisy_fixture(2200, 4, 0.2, 7);

  set_thread_cap(1);
  const PipelineOutput serial = run_pipeline(ds, 4, 4, 2, 31);
  set_thread_cap(4);
  const PipelineOutput parallel = run_pipeline(ds, 4, 4, 2, 31);
  set_thread_cap(0);  // restore default resolution

  CHECK((serial.state.Z - parallel.state.Z).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.state.A - parallel.state.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((serial.state.alpha - parallel.state.alpha).cwiseAbs().maxCoeff() == 0.0);
  CHECK(serial.report.objective_trace == parallel.report.objective_trace);
  CHECK(serial.assignments == parallel.assignments);
}

TEST_CASE("noiseless data is clustered perfectly at every depth") {
  SyntheticSpec spec;
  spec.n = 150;
  spec.k_true = 3;
  spec.p = 2;
  spec.dims = {16, 24};
  spec.noise_sigma = 0.0;
  spec.seed = 13;
  const MultiViewDataset ds =
      normalize_views(generate_synthetic(spec), NormMode::unit_column);

  for (int delta : {1, 2, 3}) {
    CAPTURE(delta);
    const PipelineOutput out = run_pipeline(ds, 3, 3, delta, 41);
    CHECK(out.report.converged);
    CHECK(out.metrics.acc == 1.0);
    CHECK(out.metrics.nmi == doctest::Approx(1.0));
    CHECK(out.metrics.purity == 1.0);
  }
}

}  // TEST_SUITE
