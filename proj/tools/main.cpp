#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alloc_tracker.hpp"
#include "mvsc/dataset.hpp"
#include "mvsc/embedding.hpp"
#include "mvsc/metrics.hpp"
#include "mvsc/model.hpp"
#include "mvsc/optimizer.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct RunOptions {
  std::string data_dir;
  std::string synthetic_spec;
  mvsc::Index clusters = 0;
  mvsc::Index anchors = 0;  // 0: same as clusters
  int depth = 2;
  std::string norm = "zscore";
  int max_iter = 100;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  int restarts = 10;
  int threads = 0;
  bool no_degree_norm = false;
  bool trace = false;
  std::string out;

  std::vector<mvsc::Index> sizes;  // benchmark
  int sweeps = 5;                  // benchmark
  std::vector<int> depths;         // sweep-depth
  std::string pred_file;           // eval
  std::string truth_file;          // eval
};

void add_dataset_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--data", o.data_dir, "dataset directory with view_<idx>.csv files");
  cmd->add_option("--synthetic", o.synthetic_spec, "synthetic dataset spec (JSON file)");
  cmd->add_option("--norm", o.norm, "feature normalization: none, zscore, unit-column")
      ->capture_default_str();
}

void add_model_options(CLI::App* cmd, RunOptions& o, bool clusters_required) {
  auto* clusters = cmd->add_option("--clusters", o.clusters, "number of clusters k");
  if (clusters_required) clusters->required();
  cmd->add_option("--anchors", o.anchors, "number of anchors m (default: --clusters)");
  cmd->add_option("--max-iter", o.max_iter, "maximum optimizer sweeps")->capture_default_str();
  cmd->add_option("--tol", o.tol, "relative convergence tolerance")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for the clustering stage")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "k-means restarts")->capture_default_str();
  cmd->add_option("--threads", o.threads,
                  "worker thread cap (0: MVSC_THREADS env or hardware)")
      ->capture_default_str();
  cmd->add_flag("--no-degree-norm", o.no_degree_norm,
                "skip anchor-degree normalization in the spectral embedding");
}

mvsc::MultiViewDataset resolve_dataset(const RunOptions& o, ordered_json& dataset_info) {
  if (o.data_dir.empty() == o.synthetic_spec.empty()) {
    throw mvsc::ValidationError("exactly one of --data or --synthetic is required");
  }
  mvsc::MultiViewDataset ds;
  if (!o.data_dir.empty()) {
    ds = mvsc::load_multiview(o.data_dir);
    dataset_info["source"] = o.data_dir;
  } else {
    ds = mvsc::generate_synthetic(mvsc::synthetic_spec_from_json(o.synthetic_spec));
    dataset_info["source"] = o.synthetic_spec;
  }
  dataset_info["n"] = ds.sample_count();
  dataset_info["views"] = ds.view_count();
  ordered_json dims = ordered_json::array();
  for (int v = 0; v < ds.view_count(); ++v) dims.push_back(ds.view_dim(v));
  dataset_info["dims"] = std::move(dims);
  dataset_info["labeled"] = ds.labels.has_value();
  dataset_info["norm"] = o.norm;
  return mvsc::normalize_views(ds, mvsc::parse_norm_mode(o.norm));
}

ordered_json metrics_json(const mvsc::MetricReport& report) {
  ordered_json j;
  j["acc"] = report.acc;
  j["nmi"] = report.nmi;
  j["purity"] = report.purity;
  ordered_json table = ordered_json::array();
  for (mvsc::Index i = 0; i < report.contingency.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (mvsc::Index c = 0; c < report.contingency.cols(); ++c) {
      row.push_back(report.contingency(i, c));
    }
    table.push_back(std::move(row));
  }
  j["contingency"] = std::move(table);
  return j;
}

void write_json(const fs::path& file, const ordered_json& j) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw mvsc::ValidationError("cannot write '" + file.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw mvsc::NumericError("failed writing '" + file.string() + "'");
}

ordered_json model_params(const RunOptions& o, mvsc::Index k, mvsc::Index m) {
  ordered_json p;
  p["clusters"] = k;
  p["anchors"] = m;
  p["depth"] = o.depth;
  p["max_iter"] = o.max_iter;
  p["rel_tol"] = o.tol;
  p["seed"] = o.seed;
  p["restarts"] = o.restarts;
  p["degree_normalize"] = !o.no_degree_norm;
  return p;
}

ordered_json fit_json(const mvsc::FitReport& report, double final_objective) {
  ordered_json j;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["final_objective"] = final_objective;
  j["objective_trace"] = report.objective_trace;
  return j;
}

ordered_json step_seconds_json(const mvsc::FitReport& report) {
  ordered_json j;
  j["projections"] = report.per_step_seconds[0];
  j["anchors"] = report.per_step_seconds[1];
  j["graph"] = report.per_step_seconds[2];
  j["weights"] = report.per_step_seconds[3];
  return j;
}

int run_fit(const RunOptions& o) {
  mvsc::set_thread_cap(o.threads);
  if (o.out.empty()) throw mvsc::ValidationError("--out directory is required");
  const auto total_start = Clock::now();

  ordered_json dataset_info;
  const mvsc::MultiViewDataset ds = resolve_dataset(o, dataset_info);
  const mvsc::Index k = o.clusters;
  const mvsc::Index m = o.anchors > 0 ? o.anchors : k;

  mvsc::FitConfig cfg;
  cfg.max_iter = o.max_iter;
  cfg.rel_tol = o.tol;
  cfg.record_trace = o.trace;

  const auto fit_start = Clock::now();
  auto [state, report] = mvsc::fit(ds, k, m, o.depth, cfg);
  const double fit_seconds = seconds_since(fit_start);

  const auto embed_start = Clock::now();
  const mvsc::SpectralEmbedding emb = mvsc::spectral_embedding(state.Z, k, !o.no_degree_norm);
  const double embed_seconds = seconds_since(embed_start);

  const auto kmeans_start = Clock::now();
  const mvsc::ClusterResult clusters = mvsc::kmeans(emb, k, o.seed, o.restarts);
  const double kmeans_seconds = seconds_since(kmeans_start);

  const fs::path out_dir(o.out);
  fs::create_directories(out_dir);
  mvsc::write_labels_csv(out_dir / "assignments.csv", clusters.assignments);
  mvsc::write_matrix_csv(out_dir / "embedding.csv", emb.coords);
  mvsc::save_state(state, out_dir / "state");
  if (o.trace) {
    std::ofstream trace_out(out_dir / "trace.txt", std::ios::trunc);
    mvsc::write_trace(report, trace_out);
  }

  ordered_json result;
  result["command"] = "fit";
  result["dataset"] = dataset_info;
  result["parameters"] = model_params(o, k, m);
  result["fit"] = fit_json(report, report.objective_trace.back());
  result["clustering"] = {{"inertia", clusters.inertia},
                          {"assignments", "assignments.csv"},
                          {"embedding", "embedding.csv"}};
  if (ds.labels) {
    mvsc::write_labels_csv(out_dir / "labels.csv", *ds.labels);
    result["metrics"] = metrics_json(mvsc::evaluate(clusters.assignments, *ds.labels));
  } else {
    result["metrics"] = nullptr;
  }
  result["execution"] = {{"threads", mvsc::thread_cap()},
                         {"fit_seconds", fit_seconds},
                         {"per_step_seconds", step_seconds_json(report)},
                         {"embedding_seconds", embed_seconds},
                         {"kmeans_seconds", kmeans_seconds},
                         {"total_seconds", seconds_since(total_start)}};
  write_json(out_dir / "result.json", result);

  std::cout << "fit: " << (report.converged ? "converged" : "stopped") << " after "
            << report.iterations << " sweep(s), objective "
            << report.objective_trace.back();
  if (ds.labels) {
    const auto& m_json = result["metrics"];
    std::cout << ", acc " << m_json["acc"].get<double>() << ", nmi "
              << m_json["nmi"].get<double>() << ", purity "
              << m_json["purity"].get<double>();
  }
  std::cout << "\nresults written to " << out_dir.string() << std::endl;
  return 0;
}

int run_gen(const RunOptions& o) {
  if (o.synthetic_spec.empty()) throw mvsc::ValidationError("--synthetic spec file is required");
  if (o.out.empty()) throw mvsc::ValidationError("--out directory is required");
  const mvsc::SyntheticSpec spec = mvsc::synthetic_spec_from_json(o.synthetic_spec);
  const mvsc::MultiViewDataset ds = mvsc::generate_synthetic(spec);
  mvsc::write_multiview(ds, o.out);
  std::cout << "wrote " << ds.view_count() << " view(s) of " << ds.sample_count()
            << " samples to " << o.out << std::endl;
  return 0;
}

int run_eval(const RunOptions& o) {
  const std::vector<int> pred = mvsc::read_labels_csv(o.pred_file);
  const std::vector<int> truth = mvsc::read_labels_csv(o.truth_file);
  const mvsc::MetricReport report = mvsc::evaluate(pred, truth);

  ordered_json result;
  result["command"] = "eval";
  result["pred"] = o.pred_file;
  result["truth"] = o.truth_file;
  result["metrics"] = metrics_json(report);
  std::cout << result.dump(2) << std::endl;
  if (!o.out.empty()) write_json(o.out, result);
  return 0;
}

int run_benchmark(const RunOptions& o) {
  mvsc::set_thread_cap(o.threads);
  if (o.sizes.empty()) throw mvsc::ValidationError("--sizes requires at least one sample count");
  for (size_t i = 1; i < o.sizes.size(); ++i) {
    if (o.sizes[i] < o.sizes[i - 1]) {
      throw mvsc::ValidationError("--sizes must be ascending");
    }
  }
  if (o.sweeps < 1) throw mvsc::ValidationError("--sweeps must be at least 1");
  if (o.out.empty()) throw mvsc::ValidationError("--out file is required");

  mvsc::SyntheticSpec spec;
  if (!o.synthetic_spec.empty()) {
    spec = mvsc::synthetic_spec_from_json(o.synthetic_spec);
  } else {
    spec.k_true = 10;
    spec.p = 2;
    spec.dims = {50, 80};
    spec.separation = 10.0;
    spec.noise_sigma = 0.1;
  }
  spec.seed = o.seed;
  const mvsc::Index k = o.clusters > 0 ? o.clusters : static_cast<mvsc::Index>(spec.k_true);
  const mvsc::Index m = o.anchors > 0 ? o.anchors : k;
  const mvsc::NormMode norm = mvsc::parse_norm_mode(o.norm);

  ordered_json rows = ordered_json::array();
  int succeeded = 0;
  for (const mvsc::Index n : o.sizes) {
    ordered_json row;
    row["n"] = n;
    try {
      mvsc::SyntheticSpec sized = spec;
      sized.n = n;
      const mvsc::MultiViewDataset ds =
          mvsc::normalize_views(mvsc::generate_synthetic(sized), norm);

      memtrack::reset_peak();
      mvsc::ModelState state = mvsc::initialize(ds, k, m, o.depth);
      std::vector<double> sweep_seconds;
      std::vector<double> objectives;
      for (int s = 0; s < o.sweeps; ++s) {
        const auto start = Clock::now();
        mvsc::update_projections(state, ds);
        mvsc::update_anchors(state, ds);
        mvsc::update_graph(state, ds);
        mvsc::update_weights(state, ds);
        sweep_seconds.push_back(seconds_since(start));
        objectives.push_back(mvsc::objective(state, ds));
      }

      double mean = 0.0;
      for (double s : sweep_seconds) mean += s;
      mean /= static_cast<double>(o.sweeps);

      row["sweeps"] = o.sweeps;
      row["seconds_per_sweep"] = mean;
      row["sweep_seconds"] = sweep_seconds;
      row["objective_trace"] = objectives;
      row["peak_bytes"] = memtrack::peak_bytes();
      ++succeeded;
      std::cout << "n=" << n << " seconds_per_sweep=" << mean
                << " peak_bytes=" << memtrack::peak_bytes() << std::endl;
    } catch (const std::bad_alloc&) {
      row["error"] = "out of memory";
      std::cout << "n=" << n << " error=out-of-memory" << std::endl;
    }
    rows.push_back(std::move(row));
  }

  ordered_json result;
  result["command"] = "benchmark";
  result["parameters"] = {{"clusters", k},     {"anchors", m},
                          {"depth", o.depth},  {"sweeps", o.sweeps},
                          {"seed", o.seed},    {"norm", o.norm},
                          {"views", spec.p},   {"dims", spec.dims},
                          {"threads", mvsc::thread_cap()}};
  result["rows"] = std::move(rows);
  write_json(o.out, result);

  if (succeeded == 0) throw mvsc::NumericError("every benchmark size failed");
  return 0;
}

int run_sweep_depth(const RunOptions& o) {
  mvsc::set_thread_cap(o.threads);
  if (o.depths.empty()) throw mvsc::ValidationError("--depths requires at least one depth");
  if (o.out.empty()) throw mvsc::ValidationError("--out file is required");

  ordered_json dataset_info;
  const mvsc::MultiViewDataset ds = resolve_dataset(o, dataset_info);
  if (!ds.labels) {
    throw mvsc::ValidationError("depth sweep requires labeled data for its metric table");
  }
  const mvsc::Index k = o.clusters;
  const mvsc::Index m = o.anchors > 0 ? o.anchors : k;

  mvsc::FitConfig cfg;
  cfg.max_iter = o.max_iter;
  cfg.rel_tol = o.tol;

  ordered_json rows = ordered_json::array();
  for (const int depth : o.depths) {
    ordered_json row;
    row["depth"] = depth;
    try {
      auto [state, report] = mvsc::fit(ds, k, m, depth, cfg);
      const mvsc::SpectralEmbedding emb =
          mvsc::spectral_embedding(state.Z, k, !o.no_degree_norm);
      const mvsc::ClusterResult clusters = mvsc::kmeans(emb, k, o.seed, o.restarts);
      const mvsc::MetricReport metrics = mvsc::evaluate(clusters.assignments, *ds.labels);
      row["acc"] = metrics.acc;
      row["nmi"] = metrics.nmi;
      row["purity"] = metrics.purity;
      row["iterations"] = report.iterations;
      row["converged"] = report.converged;
      row["final_objective"] = report.objective_trace.back();
      std::cout << "depth=" << depth << " acc=" << metrics.acc << " nmi=" << metrics.nmi
                << " purity=" << metrics.purity << std::endl;
    } catch (const std::exception& e) {
      row["error"] = e.what();
      std::cout << "depth=" << depth << " error=" << e.what() << std::endl;
    }
    rows.push_back(std::move(row));
  }

  ordered_json result;
  result["command"] = "sweep-depth";
  result["dataset"] = dataset_info;
  result["parameters"] = model_params(o, k, m);
  result["rows"] = std::move(rows);
  write_json(o.out, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anchor-based multi-view subspace clustering with hierarchical feature descent"};
  app.require_subcommand(1);

  RunOptions fit_o, gen_o, eval_o, bench_o, sweep_o;

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the model and cluster the samples");
  add_dataset_options(fit_cmd, fit_o);
  add_model_options(fit_cmd, fit_o, true);
  fit_cmd->add_option("--depth", fit_o.depth, "projection stack depth")->capture_default_str();
  fit_cmd->add_flag("--trace", fit_o.trace, "record per-sub-step objective trace");
  fit_cmd->add_option("--out", fit_o.out, "output directory")->required();

  CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset to disk");
  gen_cmd->add_option("--synthetic", gen_o.synthetic_spec, "synthetic dataset spec (JSON file)")
      ->required();
  gen_cmd->add_option("--out", gen_o.out, "output directory")->required();

  CLI::App* eval_cmd = app.add_subcommand("eval", "score stored assignments against labels");
  eval_cmd->add_option("--pred", eval_o.pred_file, "predicted assignments CSV")->required();
  eval_cmd->add_option("--truth", eval_o.truth_file, "ground-truth labels CSV")->required();
  eval_cmd->add_option("--out", eval_o.out, "optional JSON output file");

  CLI::App* bench_cmd = app.add_subcommand("benchmark", "time fixed optimizer sweeps per size");
  bench_cmd->add_option("--sizes", bench_o.sizes, "ascending sample counts")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--sweeps", bench_o.sweeps, "sweeps per size")->capture_default_str();
  bench_cmd->add_option("--synthetic", bench_o.synthetic_spec,
                        "base synthetic spec (n overridden per size)");
  bench_cmd->add_option("--clusters", bench_o.clusters, "number of clusters k");
  bench_cmd->add_option("--anchors", bench_o.anchors, "number of anchors m");
  bench_cmd->add_option("--depth", bench_o.depth, "projection stack depth")
      ->capture_default_str();
  bench_cmd->add_option("--norm", bench_o.norm, "feature normalization")->capture_default_str();
  bench_cmd->add_option("--seed", bench_o.seed, "generator seed")->capture_default_str();
  bench_cmd->add_option("--threads", bench_o.threads, "worker thread cap")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_o.out, "output JSON file")->required();

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep-depth", "fit at several depths and tabulate metrics");
  add_dataset_options(sweep_cmd, sweep_o);
  add_model_options(sweep_cmd, sweep_o, true);
  sweep_cmd->add_option("--depths", sweep_o.depths, "depths to sweep")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep_o.out, "output JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit_o);
    if (gen_cmd->parsed()) return run_gen(gen_o);
    if (eval_cmd->parsed()) return run_eval(eval_o);
    if (bench_cmd->parsed()) return run_benchmark(bench_o);
    if (sweep_cmd->parsed()) return run_sweep_depth(sweep_o);
    std::cerr << "error: no subcommand selected" << std::endl;
    return 2;
  } catch (const mvsc::ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}
