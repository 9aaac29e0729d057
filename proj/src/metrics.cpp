#include "mvsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mvsc/common.hpp"

namespace mvsc {

namespace {

std::vector<int> dense_codes(const std::vector<int>& labels, Index& distinct) {
  std::vector<int> values(labels);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  distinct = static_cast<Index>(values.size());
  std::vector<int> codes(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    codes[i] = static_cast<int>(
        std::lower_bound(values.begin(), values.end(), labels[i]) - values.begin());
  }
  return codes;
}

/// Maximum-agreement assignment on a square matrix of counts: the standard
/// O(s³) potentials form of the Hungarian algorithm run on negated counts.
long long hungarian_max(const Contingency& counts) {
  const int s = static_cast<int>(counts.rows());
  const long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(static_cast<size_t>(s) + 1, 0), v(static_cast<size_t>(s) + 1, 0);
  std::vector<int> match(static_cast<size_t>(s) + 1, 0), way(static_cast<size_t>(s) + 1, 0);

  for (int i = 1; i <= s; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<long long> minv(static_cast<size_t>(s) + 1, kInf);
    std::vector<char> used(static_cast<size_t>(s) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = match[static_cast<size_t>(j0)];
      long long delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= s; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const long long cur = -counts(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                              v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  long long total = 0;
  for (int j = 1; j <= s; ++j) total += counts(match[static_cast<size_t>(j)] - 1, j - 1);
  return total;
}

double entropy(const std::vector<long long>& counts, long long n) {
  double h = 0.0;
  for (long long c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(n);
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

Contingency contingency_table(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("label vectors differ in length: " + std::to_string(pred.size()) +
                          " vs " + std::to_string(truth.size()));
  }
  if (pred.empty()) throw ValidationError("label vectors are empty");
  Index k_pred = 0, k_true = 0;
  const std::vector<int> p = dense_codes(pred, k_pred);
  const std::vector<int> t = dense_codes(truth, k_true);
  Contingency table = Contingency::Zero(k_pred, k_true);
  for (size_t i = 0; i < p.size(); ++i) {
    table(p[i], t[i]) += 1;
  }
  return table;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency table = contingency_table(pred, truth);
  const Index s = std::max(table.rows(), table.cols());
  Contingency square = Contingency::Zero(s, s);
  square.topLeftCorner(table.rows(), table.cols()) = table;
  return static_cast<double>(hungarian_max(square)) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, NmiNorm norm) {
  const Contingency table = contingency_table(pred, truth);
  const long long n = static_cast<long long>(pred.size());

  std::vector<long long> rows(static_cast<size_t>(table.rows()), 0);
  std::vector<long long> cols(static_cast<size_t>(table.cols()), 0);
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      rows[static_cast<size_t>(i)] += table(i, j);
      cols[static_cast<size_t>(j)] += table(i, j);
    }
  }

  const double h_pred = entropy(rows, n);
  const double h_true = entropy(cols, n);
  if (h_pred == 0.0 && h_true == 0.0) return 1.0;  // two identical one-cluster partitions
  if (h_pred == 0.0 || h_true == 0.0) return 0.0;

  double info = 0.0;
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      const long long c = table(i, j);
      if (c <= 0) continue;
      const double joint = static_cast<double>(c) / static_cast<double>(n);
      info += joint * std::log(static_cast<double>(c) * static_cast<double>(n) /
                               (static_cast<double>(rows[static_cast<size_t>(i)]) *
                                static_cast<double>(cols[static_cast<size_t>(j)])));
    }
  }

  const double denom =
      norm == NmiNorm::geometric ? std::sqrt(h_pred * h_true) : 0.5 * (h_pred + h_true);
  return std::clamp(info / denom, 0.0, 1.0);
}

double purity(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Contingency table = contingency_table(pred, truth);
  long long dominant = 0;
  for (Index i = 0; i < table.rows(); ++i) {
    dominant += table.row(i).maxCoeff();
  }
  return static_cast<double>(dominant) / static_cast<double>(pred.size());
}

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
  MetricReport report;
  report.contingency = contingency_table(pred, truth);
  report.acc = accuracy(pred, truth);
  report.nmi = nmi(pred, truth);
  report.purity = purity(pred, truth);
  return report;
}

}  // namespace mvsc
