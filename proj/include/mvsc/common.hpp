#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mvsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Invalid user input: bad parameters, malformed files, shape mismatches.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numeric failure the solver cannot recover from. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics (degenerate SVD fallback, dropped anchor rows).
/// Default sink is stderr; tests may install their own.
void warn(const std::string& message);
void set_warn_sink(void (*sink)(const std::string&));

/// Worker cap for the data-parallel kernels. 0 resolves MVSC_THREADS from the
/// environment, falling back to hardware concurrency. Numerical results are
/// bit-identical for every cap: work is decomposed into a fixed chunk grid and
/// reductions combine chunk results in index order.
void set_thread_cap(int threads);
int thread_cap();

}  // namespace mvsc
