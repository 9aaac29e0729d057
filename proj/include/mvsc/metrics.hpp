#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mvsc {

using Contingency = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  Contingency contingency;  ///< k_pred x k_true, entries sum to n
};

/// Overlap counts between predicted and true clusters. Label values may be
/// arbitrary integers; they are compressed to dense indices in sorted order.
Contingency contingency_table(const std::vector<int>& pred, const std::vector<int>& truth);

/// Best-map clustering accuracy: the maximum fraction of agreeing samples
/// over injective matchings of predicted to true labels, computed exactly
/// with the Hungarian algorithm on the negated contingency matrix.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

enum class NmiNorm { geometric, arithmetic };

/// Mutual information normalized by the geometric (default) or arithmetic
/// mean of the partition entropies, natural logs. 1.0 when both partitions
/// are the identical single cluster, 0.0 when exactly one entropy vanishes.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth,
           NmiNorm norm = NmiNorm::geometric);

/// Fraction of samples whose predicted cluster's dominant true class matches
/// them: the sum of per-cluster dominant counts over n.
double purity(const std::vector<int>& pred, const std::vector<int>& truth);

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace mvsc
