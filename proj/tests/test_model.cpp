#include <filesystem>

#include "doctest.h"
#include "mvsc/model.hpp"

namespace fs = std::filesystem;
using namespace mvsc;

namespace {

MultiViewDataset small_dataset(Index n = 5) {
  MultiViewDataset ds;
  ds.views.push_back(Matrix::Random(6, n));
  ds.views.push_back(Matrix::Random(9, n));
  return ds;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("schedule slices dimensions into equal sections") {
  CHECK(build_schedule(100, 10, 3) == std::vector<Index>{100, 70, 40, 10});
  CHECK(build_schedule(10, 10, 2) == std::vector<Index>{10, 10, 10});
  CHECK(build_schedule(7, 2, 2) == std::vector<Index>{7, 4, 2});
}

TEST_CASE("schedule invariants hold over the full small-parameter range") {
  for (Index d = 1; d <= 50; ++d) {
    for (Index k = 1; k <= d; ++k) {
      for (int delta = 1; delta <= 6; ++delta) {
        const std::vector<Index> widths = build_schedule(d, k, delta);
        REQUIRE(widths.size() == static_cast<size_t>(delta) + 1);
        REQUIRE(widths.front() == d);
        REQUIRE(widths.back() == k);
        for (size_t i = 1; i < widths.size(); ++i) {
          REQUIRE(widths[i - 1] >= widths[i]);
        }
        // Equal sections: consecutive descent steps differ by at most one.
        Index min_step = d, max_step = 0;
        for (size_t i = 1; i < widths.size(); ++i) {
          min_step = std::min(min_step, widths[i - 1] - widths[i]);
          max_step = std::max(max_step, widths[i - 1] - widths[i]);
        }
        REQUIRE(max_step - min_step <= 1);
      }
    }
  }
}

TEST_CASE("schedule rejects views thinner than the target") {
  CHECK_THROWS_AS(build_schedule(5, 6, 2), ValidationError);
  CHECK_THROWS_AS(build_schedule(5, 0, 2), ValidationError);
  CHECK_THROWS_AS(build_schedule(5, 3, 0), ValidationError);
}

TEST_CASE("initialize produces the documented starting point") {
  const MultiViewDataset ds = small_dataset();
  const ModelState state = initialize(ds, 3, 3, 2);

  Matrix expected_z(3, 5);
  expected_z << 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0;
  CHECK(state.Z == expected_z);
  CHECK(state.A == Matrix::Identity(3, 3));
  CHECK(state.alpha(0) == 0.5);
  CHECK(state.alpha(1) == 0.5);
  CHECK_FALSE(state.projections_ready());
  CHECK(state.schedule.per_view[0] == std::vector<Index>{6, 4, 3});
  CHECK(state.schedule.per_view[1] == std::vector<Index>{9, 6, 3});
}

TEST_CASE("initialize builds a rectangular-identity anchor block") {
  const MultiViewDataset ds = small_dataset();
  const ModelState state = initialize(ds, 5, 3, 1);
  CHECK(state.A.rows() == 5);
  CHECK(state.A.cols() == 3);
  CHECK((state.A.transpose() * state.A - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  for (Index i = 0; i < 3; ++i) CHECK(state.A(i, i) == 1.0);
}

TEST_CASE("initialize spreads uniform weights over four views") {
  MultiViewDataset ds;
  for (int v = 0; v < 4; ++v) ds.views.push_back(Matrix::Random(7, 6));
  const ModelState state = initialize(ds, 3, 3, 1);
  for (Index v = 0; v < 4; ++v) CHECK(state.alpha(v) == 0.25);
}

TEST_CASE("initialize validates parameter ranges") {
  const MultiViewDataset ds = small_dataset();
  CHECK_THROWS_AS(initialize(ds, 3, 4, 1), ValidationError);   // m > k
  CHECK_THROWS_AS(initialize(ds, 7, 3, 1), ValidationError);   // k > min view dim
  CHECK_THROWS_AS(initialize(ds, 3, 3, 0), ValidationError);   // bad depth
  CHECK_THROWS_AS(initialize(ds, 0, 0, 1), ValidationError);   // bad k
  const MultiViewDataset tiny = small_dataset(2);
  CHECK_THROWS_AS(initialize(tiny, 3, 3, 1), ValidationError);  // m > n
}

TEST_CASE("state validation accepts the initial state invariants it can check") {
  const MultiViewDataset ds = small_dataset();
  ModelState state = initialize(ds, 3, 3, 2);
  // The fresh graph violates unit column sums beyond column m by design;
  // patch the transient before validating the rest.
  for (Index c = 3; c < state.Z.cols(); ++c) state.Z(0, c) = 1.0;
  CHECK_NOTHROW(validate(state));

  SUBCASE("detects non-orthonormal anchors") {
    state.A(0, 0) = 2.0;
    CHECK_THROWS_AS(validate(state), ValidationError);
  }
  SUBCASE("detects negative graph entries") {
    state.Z(0, 0) = -0.2;
    state.Z(1, 0) = 1.2;
    CHECK_THROWS_AS(validate(state), ValidationError);
  }
  SUBCASE("detects column sums away from one") {
    state.Z(0, 0) = 0.5;
    CHECK_THROWS_AS(validate(state), ValidationError);
  }
  SUBCASE("detects weights off the simplex") {
    state.alpha(0) = 0.9;
    CHECK_THROWS_AS(validate(state), ValidationError);
  }
}

TEST_CASE("state round-trips through its serialized directory") {
  const MultiViewDataset ds = small_dataset();
  ModelState state = initialize(ds, 3, 2, 2);
  for (Index c = 2; c < state.Z.cols(); ++c) state.Z(0, c) = 1.0;

  const fs::path dir = fs::temp_directory_path() / "mvsc_test_state";
  fs::remove_all(dir);

  SUBCASE("without projection stacks") {
    save_state(state, dir);
    const ModelState back = load_state(dir);
    CHECK(back.Z == state.Z);
    CHECK(back.A == state.A);
    CHECK(back.alpha == state.alpha);
    CHECK(back.k == state.k);
    CHECK(back.m == state.m);
    CHECK(back.delta == state.delta);
    CHECK_FALSE(back.projections_ready());
    CHECK(back.schedule.per_view == state.schedule.per_view);
  }

  SUBCASE("with projection stacks") {
    state.W.resize(2);
    for (size_t v = 0; v < 2; ++v) {
      const auto& widths = state.schedule.per_view[v];
      for (int i = 0; i < state.delta; ++i) {
        state.W[v].push_back(Matrix::Identity(widths[static_cast<size_t>(i)],
                                              widths[static_cast<size_t>(i) + 1]));
      }
    }
    save_state(state, dir);
    const ModelState back = load_state(dir);
    REQUIRE(back.projections_ready());
    for (size_t v = 0; v < 2; ++v) {
      for (size_t i = 0; i < back.W[v].size(); ++i) {
        CHECK(back.W[v][i] == state.W[v][i]);
      }
    }
  }
}

}  // TEST_SUITE
