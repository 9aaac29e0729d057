#include "mvsc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "rng.hpp"

namespace mvsc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

double parse_double(std::string_view token, const std::filesystem::path& file, size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(quoted(file) + " line " + std::to_string(line) + ": bad number '" +
         std::string(token) + "'");
  }
  return value;
}

long parse_int(std::string_view token, const std::filesystem::path& file, size_t line) {
  long value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(quoted(file) + " line " + std::to_string(line) + ": bad integer '" +
         std::string(token) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open " + quoted(file));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(quoted(file) + ": " + e.what());
  }
  return j;
}

std::vector<int> remap_labels(std::vector<long> raw) {
  std::vector<long> values = raw;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::map<long, int> code;
  for (size_t i = 0; i < values.size(); ++i) code[values[i]] = static_cast<int>(i);
  std::vector<int> out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) out[i] = code[raw[i]];
  return out;
}

}  // namespace

Index MultiViewDataset::min_view_dim() const {
  Index best = 0;
  for (const auto& v : views) {
    if (best == 0 || v.rows() < best) best = v.rows();
  }
  return best;
}

void validate(const MultiViewDataset& ds) {
  if (ds.views.empty()) fail("dataset has no views");
  const Index n = ds.views.front().cols();
  if (n < 2) fail("dataset needs at least 2 samples, got " + std::to_string(n));
  for (int v = 0; v < ds.view_count(); ++v) {
    const Matrix& x = ds.views[static_cast<size_t>(v)];
    if (x.rows() < 1) fail("view " + std::to_string(v) + " has no features");
    if (x.cols() != n) {
      fail("view " + std::to_string(v) + " has " + std::to_string(x.cols()) +
           " samples, expected " + std::to_string(n));
    }
    if (!x.allFinite()) fail("view " + std::to_string(v) + " contains non-finite values");
  }
  if (ds.labels && static_cast<Index>(ds.labels->size()) != n) {
    fail("label count " + std::to_string(ds.labels->size()) + " does not match sample count " +
         std::to_string(n));
  }
  if (!ds.view_names.empty() && static_cast<int>(ds.view_names.size()) != ds.view_count()) {
    fail("view name count does not match view count");
  }
}

NormMode parse_norm_mode(const std::string& name) {
  if (name == "none") return NormMode::none;
  if (name == "zscore") return NormMode::zscore;
  if (name == "unit-column" || name == "unit_column") return NormMode::unit_column;
  fail("unknown normalization mode '" + name + "' (expected none, zscore or unit-column)");
}

std::string to_string(NormMode mode) {
  switch (mode) {
    case NormMode::none: return "none";
    case NormMode::zscore: return "zscore";
    case NormMode::unit_column: return "unit_column";
  }
  return "none";
}

MultiViewDataset normalize_views(const MultiViewDataset& ds, NormMode mode) {
  MultiViewDataset out = ds;
  if (mode == NormMode::none) return out;
  for (auto& x : out.views) {
    if (mode == NormMode::zscore) {
      const double n = static_cast<double>(x.cols());
      for (Index r = 0; r < x.rows(); ++r) {
        const double mean = x.row(r).mean();
        x.row(r).array() -= mean;
        const double sd = std::sqrt(x.row(r).squaredNorm() / n);
        if (sd > 0.0) {
          x.row(r) /= sd;
        } else {
          x.row(r).setZero();
        }
      }
    } else {  // unit_column
      for (Index c = 0; c < x.cols(); ++c) {
        const double norm = x.col(c).norm();
        if (norm > 0.0) x.col(c) /= norm;
      }
    }
  }
  return out;
}

Matrix read_matrix_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open " + quoted(file));
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::vector<double> row;
    while (true) {
      const size_t comma = rest.find(',');
      std::string_view token = trim(rest.substr(0, comma));
      row.push_back(parse_double(token, file, lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      fail(quoted(file) + " line " + std::to_string(lineno) + ": expected " +
           std::to_string(width) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(quoted(file) + " is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < width; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& file, const Matrix& m) {
  std::string body;
  body.reserve(static_cast<size_t>(m.size()) * 12);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) body.push_back(',');
      append_number(body, m(r, c));
    }
    body.push_back('\n');
  }
  std::ofstream out(file, std::ios::trunc);
  if (!out) fail("cannot write " + quoted(file));
  out << body;
  if (!out) fail("failed writing " + quoted(file));
}

std::vector<int> read_labels_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open " + quoted(file));
  std::vector<long> raw;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view token = trim(line);
    if (token.empty()) continue;
    raw.push_back(parse_int(token, file, lineno));
  }
  if (raw.empty()) fail(quoted(file) + " is empty");
  return remap_labels(std::move(raw));
}

void write_labels_csv(const std::filesystem::path& file, const std::vector<int>& labels) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) fail("cannot write " + quoted(file));
  for (int v : labels) out << v << '\n';
  if (!out) fail("failed writing " + quoted(file));
}

MultiViewDataset load_multiview(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) fail(quoted(root) + " is not a directory");

  std::vector<fs::path> view_files;
  fs::path labels_file;

  const fs::path meta = root / "meta.json";
  if (fs::exists(meta)) {
    json j = read_json_file(meta);
    if (!j.contains("views") || !j["views"].is_array() || j["views"].empty()) {
      fail(quoted(meta) + ": missing non-empty 'views' array");
    }
    for (const auto& name : j["views"]) {
      if (!name.is_string()) fail(quoted(meta) + ": view entries must be filenames");
      view_files.push_back(root / name.get<std::string>());
    }
    if (j.contains("labels") && !j["labels"].is_null()) {
      labels_file = root / j["labels"].get<std::string>();
    }
  } else {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.rfind("view_", 0) == 0 && entry.path().extension() == ".csv") {
        view_files.push_back(entry.path());
      }
    }
    std::sort(view_files.begin(), view_files.end());
    if (fs::exists(root / "labels.csv")) labels_file = root / "labels.csv";
  }

  if (view_files.empty()) {
    fail(quoted(root) + " contains no view_<idx>.csv files and no meta.json");
  }

  MultiViewDataset ds;
  for (const auto& file : view_files) {
    ds.views.push_back(read_matrix_csv(file));
    ds.view_names.push_back(file.stem().string());
  }
  if (!labels_file.empty()) ds.labels = read_labels_csv(labels_file);
  validate(ds);
  return ds;
}

void write_multiview(const MultiViewDataset& ds, const std::filesystem::path& root) {
  validate(ds);
  std::filesystem::create_directories(root);
  for (int v = 0; v < ds.view_count(); ++v) {
    char name[32];
    std::snprintf(name, sizeof(name), "view_%02d.csv", v);
    write_matrix_csv(root / name, ds.views[static_cast<size_t>(v)]);
  }
  if (ds.labels) write_labels_csv(root / "labels.csv", *ds.labels);
}

SyntheticSpec synthetic_spec_from_json(const std::filesystem::path& file) {
  json j = read_json_file(file);
  SyntheticSpec spec;
  try {
    spec.n = j.at("n").get<Index>();
    spec.k_true = j.at("k_true").get<int>();
    spec.dims = j.at("dims").get<std::vector<Index>>();
    spec.p = j.contains("p") ? j["p"].get<int>() : static_cast<int>(spec.dims.size());
    if (j.contains("separation")) spec.separation = j["separation"].get<double>();
    if (j.contains("noise_sigma")) spec.noise_sigma = j["noise_sigma"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(quoted(file) + ": " + e.what());
  }
  return spec;
}

MultiViewDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) fail("synthetic spec: n must be at least 2");
  if (spec.k_true < 1) fail("synthetic spec: k_true must be positive");
  if (spec.k_true > spec.n) fail("synthetic spec: k_true exceeds n");
  if (spec.p < 1) fail("synthetic spec: p must be positive");
  if (static_cast<int>(spec.dims.size()) != spec.p) {
    fail("synthetic spec: dims size does not match p");
  }
  for (Index d : spec.dims) {
    if (d < spec.k_true) {
      fail("synthetic spec: every view dimension must be at least k_true");
    }
  }
  if (spec.noise_sigma < 0.0) fail("synthetic spec: noise_sigma must be non-negative");

  const Index k = spec.k_true;

  // Latent representation: cluster c sits at separation * e_c in R^k, so
  // centers are mutually separation * sqrt(2) apart. Samples take their
  // cluster center exactly; all spread comes from per-view noise.
  std::vector<int> labels(static_cast<size_t>(spec.n));
  Matrix latent = Matrix::Zero(k, spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    const int c = static_cast<int>(i % k);
    labels[static_cast<size_t>(i)] = c;
    latent(c, i) = spec.separation;
  }

  MultiViewDataset ds;
  ds.labels = std::move(labels);
  for (int v = 0; v < spec.p; ++v) {
    const Index d = spec.dims[static_cast<size_t>(v)];
    std::mt19937_64 gen(detail::substream_seed(spec.seed, static_cast<std::uint64_t>(v)));

    // Random orthonormal-column map d x k: QR of a Gaussian matrix with the
    // sign fixed so the factor is unique (R diagonal positive).
    Matrix g(d, k);
    for (Index c = 0; c < k; ++c) {
      for (Index r = 0; r < d; ++r) g(r, c) = detail::gaussian(gen);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, k);
    Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    for (Index c = 0; c < k; ++c) {
      if (r(c, c) < 0.0) q.col(c) = -q.col(c);
    }

    Matrix x = q * latent;
    if (spec.noise_sigma > 0.0) {
      for (Index col = 0; col < x.cols(); ++col) {
        for (Index row = 0; row < x.rows(); ++row) {
          x(row, col) += spec.noise_sigma * detail::gaussian(gen);
        }
      }
    }
    ds.views.push_back(std::move(x));
    ds.view_names.push_back("view_" + std::to_string(v));
  }
  validate(ds);
  return ds;
}

}  // namespace mvsc
