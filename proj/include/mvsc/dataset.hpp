#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvsc/common.hpp"

namespace mvsc {

/// A fixed set of n samples observed through p feature matrices ("views").
/// Views are feature-major: view v is d_v x n with one sample per column, and
/// every view shares the same column ordering. Datasets are immutable once
/// built and safe to share across threads.
struct MultiViewDataset {
  std::vector<Matrix> views;
  std::optional<std::vector<int>> labels;  ///< ground truth, 0..k_true-1
  std::vector<std::string> view_names;

  Index sample_count() const { return views.empty() ? 0 : views.front().cols(); }
  int view_count() const { return static_cast<int>(views.size()); }
  Index view_dim(int v) const { return views.at(static_cast<size_t>(v)).rows(); }
  Index min_view_dim() const;
};

/// Throws ValidationError on the first structural violation: empty view list,
/// n < 2, mismatched column counts, non-finite entries, bad label length.
void validate(const MultiViewDataset& ds);

enum class NormMode { none, zscore, unit_column };

NormMode parse_norm_mode(const std::string& name);
std::string to_string(NormMode mode);

/// `zscore` centers every feature row to mean 0 and unit standard deviation
/// (constant rows become all-zero); `unit_column` rescales every sample column
/// of every view to unit Euclidean norm (zero columns untouched).
MultiViewDataset normalize_views(const MultiViewDataset& ds, NormMode mode);

/// Loads a dataset directory: one `view_<idx>.csv` per view (features x
/// samples, no header) plus optional `labels.csv`, or filenames overridden by
/// a `meta.json` manifest. Views are ordered by lexicographic filename.
/// Label values are remapped to dense 0-based codes in sorted value order.
MultiViewDataset load_multiview(const std::filesystem::path& root);

/// Writes the same layout load_multiview reads back.
void write_multiview(const MultiViewDataset& ds, const std::filesystem::path& root);

struct SyntheticSpec {
  Index n = 0;
  int k_true = 0;
  int p = 0;
  std::vector<Index> dims;   ///< per-view feature dimensions, each >= k_true
  double separation = 10.0;  ///< latent distance scale between cluster centers
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

SyntheticSpec synthetic_spec_from_json(const std::filesystem::path& file);

/// Plants k_true latent centers separation apart, assigns samples round-robin,
/// maps each view through a seeded random orthonormal-column matrix and adds
/// Gaussian noise. Pure function of the spec: identical spec, identical bytes.
MultiViewDataset generate_synthetic(const SyntheticSpec& spec);

// CSV conventions shared by every module that serializes matrices:
// comma-separated, one matrix row per line, no header, shortest
// round-trippable decimal form. Labels are one integer per line.
Matrix read_matrix_csv(const std::filesystem::path& file);
void write_matrix_csv(const std::filesystem::path& file, const Matrix& m);
std::vector<int> read_labels_csv(const std::filesystem::path& file);
void write_labels_csv(const std::filesystem::path& file, const std::vector<int>& labels);

}  // namespace mvsc
