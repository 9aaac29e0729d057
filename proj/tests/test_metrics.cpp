#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mvsc/common.hpp"
#include "mvsc/metrics.hpp"
#include "oracles.hpp"

using namespace mvsc;

namespace {

std::vector<int> random_labels(Index n, int k, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> out(static_cast<size_t>(n));
  for (auto& v : out) v = pick(gen);
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("worked example: six samples, one mislabeled") {
  const std::vector<int> truth = {0, 0, 1, 1, 2, 2};
  const std::vector<int> pred = {1, 1, 0, 0, 0, 2};
  CHECK(accuracy(pred, truth) == doctest::Approx(5.0 / 6.0));
  CHECK(purity(pred, truth) == doctest::Approx(5.0 / 6.0));
  CHECK(nmi(pred, truth) > 0.0);
  CHECK(nmi(pred, truth) < 1.0);

  const MetricReport report = evaluate(pred, truth);
  CHECK(report.acc == doctest::Approx(5.0 / 6.0));
  CHECK(report.purity == doctest::Approx(5.0 / 6.0));
  CHECK(report.nmi == doctest::Approx(nmi(pred, truth)));
  CHECK(report.contingency.sum() == 6);
}

TEST_CASE("accuracy matches brute-force matching on random partitions") {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> pick_k(1, 6);
  std::uniform_int_distribution<Index> pick_n(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = pick_n(gen);
    const std::vector<int> pred = random_labels(n, pick_k(gen), gen);
    const std::vector<int> truth = random_labels(n, pick_k(gen), gen);
    const double fast = accuracy(pred, truth);
    const double slow = oracles::brute_force_accuracy(pred, truth);
    CAPTURE(trial);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("accuracy is invariant to relabeling either side") {
  std::mt19937_64 gen(29);
  const std::vector<int> truth = random_labels(200, 5, gen);
  const std::vector<int> pred = random_labels(200, 4, gen);
  const double base = accuracy(pred, truth);

  std::vector<int> perm = {3, 0, 4, 1, 2};
  std::vector<int> pred_renamed(pred.size()), truth_renamed(truth.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    pred_renamed[i] = perm[static_cast<size_t>(pred[i])];
    truth_renamed[i] = perm[static_cast<size_t>(truth[i])];
  }
  CHECK(accuracy(pred_renamed, truth) == doctest::Approx(base).epsilon(1e-12));
  CHECK(accuracy(pred, truth_renamed) == doctest::Approx(base).epsilon(1e-12));

  // Arbitrary (even negative) label values, same partition.
  std::vector<int> weird(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) weird[i] = pred[i] * -17 + 3;
  CHECK(accuracy(weird, truth) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("perfect and constant predictions hit the metric extremes") {
  std::mt19937_64 gen(31);
  const std::vector<int> truth = random_labels(120, 4, gen);
  CHECK(accuracy(truth, truth) == 1.0);
  CHECK(nmi(truth, truth) == doctest::Approx(1.0));
  CHECK(purity(truth, truth) == 1.0);

  const std::vector<int> constant(truth.size(), 7);
  // One entropy vanishes: mutual information is zero by convention.
  CHECK(nmi(constant, truth) == 0.0);
  CHECK(nmi(truth, constant) == 0.0);
  // A single predicted cluster is as pure as its dominant class share.
  Contingency table = contingency_table(constant, truth);
  CHECK(purity(constant, truth) ==
        doctest::Approx(static_cast<double>(table.row(0).maxCoeff()) / 120.0));

  const std::vector<int> both(50, 2);
  CHECK(nmi(both, both) == 1.0);  // two identical single-cluster partitions
  CHECK(accuracy(both, both) == 1.0);
}

TEST_CASE("checkerboard partitions share no information") {
  const std::vector<int> a = {0, 0, 1, 1};
  const std::vector<int> b = {0, 1, 0, 1};
  CHECK(nmi(a, b) == doctest::Approx(0.0));
  CHECK(accuracy(a, b) == doctest::Approx(0.5));
}

TEST_CASE("independent partitions have near-zero mutual information") {
  std::mt19937_64 gen(37);
  const std::vector<int> a = random_labels(10000, 5, gen);
  const std::vector<int> b = random_labels(10000, 5, gen);
  CHECK(nmi(a, b) < 0.1);
  CHECK(nmi(a, b) >= 0.0);
}

TEST_CASE("arithmetic normalization is bounded by the geometric one") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int> a = random_labels(150, 3, gen);
    const std::vector<int> b = random_labels(150, 6, gen);
    const double geo = nmi(a, b, NmiNorm::geometric);
    const double arith = nmi(a, b, NmiNorm::arithmetic);
    CHECK(arith <= geo + 1e-12);  // AM-GM on the entropies
    CHECK(arith >= 0.0);
    CHECK(geo <= 1.0);
  }
}

TEST_CASE("contingency table compresses sorted label values") {
  const std::vector<int> pred = {5, -1, 5, 9};
  const std::vector<int> truth = {2, 2, 3, 3};
  const Contingency table = contingency_table(pred, truth);
  REQUIRE(table.rows() == 3);  // -1, 5, 9 in sorted order
  REQUIRE(table.cols() == 2);
  CHECK(table(0, 0) == 1);  // pred -1, truth 2
  CHECK(table(1, 0) == 1);  // pred 5, truth 2
  CHECK(table(1, 1) == 1);  // pred 5, truth 3
  CHECK(table(2, 1) == 1);  // pred 9, truth 3
  CHECK(table.sum() == 4);
}

TEST_CASE("metrics stay within their ranges on adversarial shapes") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> pick_k(1, 8);
    const std::vector<int> pred = random_labels(60, pick_k(gen), gen);
    const std::vector<int> truth = random_labels(60, pick_k(gen), gen);
    const MetricReport report = evaluate(pred, truth);
    CHECK(report.acc >= 0.0);
    CHECK(report.acc <= 1.0);
    CHECK(report.nmi >= 0.0);
    CHECK(report.nmi <= 1.0);
    CHECK(report.purity >= 0.0);
    CHECK(report.purity <= 1.0);
    CHECK(report.purity + 1e-12 >= report.acc);  // matching is a restriction
  }
}

TEST_CASE("mismatched or empty label vectors are rejected") {
  const std::vector<int> a = {0, 1};
  const std::vector<int> b = {0, 1, 2};
  CHECK_THROWS_AS(accuracy(a, b), ValidationError);
  CHECK_THROWS_AS(nmi(a, b), ValidationError);
  CHECK_THROWS_AS(purity(a, b), ValidationError);
  CHECK_THROWS_AS(contingency_table({}, {}), ValidationError);
  CHECK_THROWS_AS(evaluate({}, {}), ValidationError);
}

}  // TEST_SUITE
