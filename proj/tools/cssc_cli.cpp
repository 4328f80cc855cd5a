#include "cssc/cssc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Atomic artifact writing: every file lands via write-then-rename.

void rename_into_place(const fs::path& tmp, const fs::path& final_path) {
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + final_path.string() +
                             "': " + ec.message());
  }
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  rename_into_place(tmp, path);
}

void write_json_atomic(const fs::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

/// Runs `writer` against a temporary path, then renames the result into place.
void write_file_atomic(const fs::path& path, const std::function<void(const fs::path&)>& writer) {
  const fs::path tmp = path.string() + ".tmp";
  writer(tmp);
  rename_into_place(tmp, path);
}

// ---------------------------------------------------------------------------
// JSON config merging: CLI flags win, then config values, then defaults.

class ConfigMerge {
 public:
  ConfigMerge(CLI::App* sub, const std::string& config_path) : sub_(sub) {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file '" + config_path + "'");
    try {
      in >> cfg_;
    } catch (const json::parse_error& e) {
      throw std::runtime_error("config file '" + config_path + "' is not valid JSON: " + e.what());
    }
    if (!cfg_.is_object())
      throw std::runtime_error("config file '" + config_path + "' must hold a JSON object");
    loaded_ = true;
  }

  /// Binds config key `key` to `var` unless the matching flag was given.
  template <typename T>
  void merge(const std::string& key, const std::string& flag, T& var) {
    consumed_.insert(key);
    if (!loaded_ || !cfg_.contains(key) || cfg_.at(key).is_null()) return;
    const CLI::Option* opt = sub_->get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;
    try {
      var = cfg_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::runtime_error("config key '" + key + "': " + e.what());
    }
  }

  /// Rejects config keys that map to no flag of this subcommand. Keys a
  /// run.json adds as outputs are tolerated so that any run.json can be fed
  /// back verbatim through --config.
  void finish() const {
    if (!loaded_) return;
    static const std::set<std::string> result_keys{"command", "artifacts", "iterations",
                                                   "converged", "effective_lambda"};
    for (const auto& [key, value] : cfg_.items()) {
      if (result_keys.find(key) != result_keys.end()) continue;
      if (consumed_.find(key) == consumed_.end())
        throw std::runtime_error("config key '" + key + "' is not recognized by this subcommand");
    }
  }

 private:
  CLI::App* sub_;
  json cfg_;
  bool loaded_ = false;
  std::set<std::string> consumed_;
};

// ---------------------------------------------------------------------------
// Shared option bundles.

struct DataOpts {
  std::string data;
  std::string orientation = "rows-are-features";
  std::string labels;
  std::string constraints;
  double p = -1.0;  // sentinel: not provided
  std::uint64_t seed = 0;
  bool no_normalize = false;
};

struct ModelOpts {
  std::string method;
  int n = 0;
  double lambda = -1.0;   // sentinel: not provided
  double lambda0 = -1.0;  // sentinel: not provided
  double alpha = -1.0;    // sentinel: not provided
  double rho = 100.0;
  int max_iters = 2000;
  double tol_abs = 1e-6;
  double tol_rel = 1e-4;
  std::string error_norm = "frobenius";
  int restarts = 20;
  int kmeans_iters = 300;
  bool regularize_degree = false;
  double cl_scale = 1.0;
  int t_max = 10;
};

void add_data_flags(CLI::App* sub, DataOpts& d, bool with_constraints = true) {
  sub->add_option("--data", d.data, "Input matrix file (CSV/TSV; delimiter auto-detected)");
  sub->add_option("--orientation", d.orientation,
                  "Matrix orientation: rows-are-features or rows-are-samples")
      ->check(CLI::IsMember({"rows-are-features", "rows-are-samples"}));
  sub->add_option("--labels", d.labels, "Ground-truth labels file (one 1-based id per line)");
  if (with_constraints) {
    sub->add_option("--constraints", d.constraints,
                    "Pairwise constraints file ('i j ML' or 'i j CL', 0-based)");
    sub->add_option("--p", d.p,
                    "Fraction of point pairs to sample as constraints from --labels");
  }
  sub->add_option("--seed", d.seed, "Base seed; derived streams are documented in the README");
  sub->add_flag("--no-normalize", d.no_normalize,
                "Skip unit-norm column scaling (columns must already be comparable)");
}

void add_model_flags(CLI::App* sub, ModelOpts& m) {
  sub->add_option("--method", m.method, "Clustering method")
      ->check(CLI::IsMember({"ssc", "ssc_plus", "cssc", "cssc_plus", "cs3c", "cs3c_plus", "lsr1",
                             "lsr2", "lsr1_plus", "lsr2_plus"}));
  sub->add_option("--n", m.n, "Number of clusters");
  sub->add_option("--lambda", m.lambda, "Solver tradeoff (or LSR ridge) parameter");
  sub->add_option("--lambda0", m.lambda0,
                  "Dimensionless tradeoff; scaled by the data's min-max inner product");
  sub->add_option("--alpha", m.alpha, "Segmentation-coupling strength (cs3c, cs3c_plus)");
  sub->add_option("--rho", m.rho, "ADMM penalty parameter");
  sub->add_option("--max-iters", m.max_iters, "ADMM iteration cap");
  sub->add_option("--tol-abs", m.tol_abs, "ADMM absolute tolerance");
  sub->add_option("--tol-rel", m.tol_rel, "ADMM relative tolerance");
  sub->add_option("--error-norm", m.error_norm, "Residual model: frobenius or l1")
      ->check(CLI::IsMember({"frobenius", "l1"}));
  sub->add_option("--restarts", m.restarts, "k-means restarts");
  sub->add_option("--kmeans-iters", m.kmeans_iters, "k-means iteration cap");
  sub->add_flag("--regularize-degree", m.regularize_degree,
                "Add a tiny epsilon to vertex degrees so empty graphs embed");
  sub->add_option("--cl-scale", m.cl_scale,
                  "Multiplier on cannot-link weights (>1 approaches hard exclusion)");
  sub->add_option("--t-max", m.t_max, "Outer alternation cap for cs3c variants");
}

void merge_data_config(ConfigMerge& cfg, DataOpts& d, bool with_constraints = true) {
  cfg.merge("data", "--data", d.data);
  cfg.merge("orientation", "--orientation", d.orientation);
  cfg.merge("labels", "--labels", d.labels);
  if (with_constraints) {
    cfg.merge("constraints", "--constraints", d.constraints);
    cfg.merge("p", "--p", d.p);
  }
  cfg.merge("seed", "--seed", d.seed);
  cfg.merge("no_normalize", "--no-normalize", d.no_normalize);
}

void merge_model_config(ConfigMerge& cfg, ModelOpts& m) {
  cfg.merge("method", "--method", m.method);
  cfg.merge("n", "--n", m.n);
  cfg.merge("lambda", "--lambda", m.lambda);
  cfg.merge("lambda0", "--lambda0", m.lambda0);
  cfg.merge("alpha", "--alpha", m.alpha);
  cfg.merge("rho", "--rho", m.rho);
  cfg.merge("max_iters", "--max-iters", m.max_iters);
  cfg.merge("tol_abs", "--tol-abs", m.tol_abs);
  cfg.merge("tol_rel", "--tol-rel", m.tol_rel);
  cfg.merge("error_norm", "--error-norm", m.error_norm);
  cfg.merge("restarts", "--restarts", m.restarts);
  cfg.merge("kmeans_iters", "--kmeans-iters", m.kmeans_iters);
  cfg.merge("regularize_degree", "--regularize-degree", m.regularize_degree);
  cfg.merge("cl_scale", "--cl-scale", m.cl_scale);
  cfg.merge("t_max", "--t-max", m.t_max);
}

json data_to_json(const DataOpts& d, bool with_constraints = true) {
  json j;
  j["data"] = d.data;
  j["orientation"] = d.orientation;
  j["labels"] = d.labels.empty() ? json(nullptr) : json(d.labels);
  if (with_constraints) {
    j["constraints"] = d.constraints.empty() ? json(nullptr) : json(d.constraints);
    j["p"] = d.p < 0.0 ? json(nullptr) : json(d.p);
  }
  j["seed"] = d.seed;
  j["no_normalize"] = d.no_normalize;
  return j;
}

json model_to_json(const ModelOpts& m) {
  json j;
  j["method"] = m.method;
  j["n"] = m.n;
  j["lambda"] = m.lambda < 0.0 ? json(nullptr) : json(m.lambda);
  j["lambda0"] = m.lambda0 < 0.0 ? json(nullptr) : json(m.lambda0);
  j["alpha"] = m.alpha < 0.0 ? json(nullptr) : json(m.alpha);
  j["rho"] = m.rho;
  j["max_iters"] = m.max_iters;
  j["tol_abs"] = m.tol_abs;
  j["tol_rel"] = m.tol_rel;
  j["error_norm"] = m.error_norm;
  j["restarts"] = m.restarts;
  j["kmeans_iters"] = m.kmeans_iters;
  j["regularize_degree"] = m.regularize_degree;
  j["cl_scale"] = m.cl_scale;
  j["t_max"] = m.t_max;
  return j;
}

// ---------------------------------------------------------------------------
// Input assembly.

struct LoadedInputs {
  cssc::DataMatrix X;  // columns normalized
  std::optional<cssc::Labels> truth;
  cssc::ConstraintSet cs = cssc::ConstraintSet::none(0);
  bool cs_sampled = false;
};

LoadedInputs load_inputs(const DataOpts& d, bool method_uses_cs) {
  if (d.data.empty()) throw std::runtime_error("--data is required");
  LoadedInputs in;
  {
    cssc::DataMatrix raw = cssc::load_matrix(d.data, cssc::parse_orientation(d.orientation));
    raw.validate();
    in.X = d.no_normalize ? std::move(raw) : cssc::normalize_columns(raw);
  }
  const int N = static_cast<int>(in.X.samples());

  if (!d.labels.empty()) {
    cssc::Labels t = cssc::load_labels(d.labels);
    if (t.size() != N)
      throw std::runtime_error("labels file has " + std::to_string(t.size()) +
                               " entries but the data has " + std::to_string(N) + " samples");
    in.truth = std::move(t);
  }

  const bool have_file = !d.constraints.empty();
  const bool have_p = d.p >= 0.0;
  if (have_file && have_p)
    throw std::runtime_error("supply either --constraints or --p, not both");
  if (method_uses_cs && !have_file && !have_p)
    throw std::runtime_error(
        "this method consumes pairwise constraints: supply --constraints FILE or --p RATE");

  if (have_file) {
    in.cs = cssc::load_constraints(d.constraints, N);
  } else if (have_p) {
    if (d.p > 1.0) throw std::runtime_error("--p must lie in [0, 1]");
    if (!in.truth)
      throw std::runtime_error("sampling constraints with --p needs ground-truth --labels");
    in.cs = cssc::sample_side_information(*in.truth, d.p, d.seed);
    in.cs_sampled = true;
  } else {
    in.cs = cssc::ConstraintSet::none(N);
  }
  return in;
}

cssc::PipelineOptions build_pipeline_options(const ModelOpts& m, const cssc::DataMatrix& X,
                                             std::uint64_t seed, cssc::Method method) {
  if (m.n < 1) throw std::runtime_error("--n (number of clusters) is required");
  cssc::PipelineOptions opts;
  opts.n = m.n;
  opts.seed = seed;
  opts.solver.rho = m.rho;
  opts.solver.max_iters = m.max_iters;
  opts.solver.tol_abs = m.tol_abs;
  opts.solver.tol_rel = m.tol_rel;
  opts.solver.error_norm =
      m.error_norm == "l1" ? cssc::ErrorNorm::l1 : cssc::ErrorNorm::frobenius;
  opts.kmeans.restarts = m.restarts;
  opts.kmeans.max_iterations = m.kmeans_iters;
  opts.embedding.regularize_degree = m.regularize_degree;
  opts.cannot_link_scale = m.cl_scale;

  const bool has_lambda = m.lambda >= 0.0;
  const bool has_lambda0 = m.lambda0 >= 0.0;
  if (has_lambda && has_lambda0)
    throw std::runtime_error("supply either --lambda or --lambda0, not both");
  if (cssc::method_is_lsr(method)) {
    if (has_lambda0)
      throw std::runtime_error("the lsr family takes a direct --lambda, not --lambda0");
    if (!has_lambda) throw std::runtime_error("the lsr family requires --lambda");
    opts.solver.lambda = m.lambda;
  } else {
    if (has_lambda)
      opts.solver.lambda = m.lambda;
    else if (has_lambda0)
      opts.solver.lambda = cssc::lambda_from_lambda0(X, m.lambda0);
    else
      throw std::runtime_error("supply --lambda or --lambda0");
  }

  if (cssc::method_uses_alpha(method) && m.alpha < 0.0)
    throw std::runtime_error("cs3c and cs3c_plus require --alpha >= 0");
  return opts;
}

double resolve_alpha(const ModelOpts& m, cssc::Method method) {
  return cssc::method_uses_alpha(method) && m.alpha >= 0.0 ? m.alpha : 0.0;
}

json metrics_to_json(const cssc::MetricsReport& r) {
  json j;
  if (r.err) j["err"] = *r.err;
  if (r.rand_index_value) j["rand_index"] = *r.rand_index_value;
  if (r.rie) j["rie"] = *r.rie;
  if (r.bound) j["bound"] = *r.bound;
  j["n_constraints"] = r.n_constraints;
  return j;
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string format_g(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterArgs {
  DataOpts data;
  ModelOpts model;
  std::vector<std::string> metrics;
  bool save_coefficients = false;
  bool save_affinity = false;
  bool save_embedding = false;
  std::string out;
  std::string config;
};

int run_cluster(CLI::App* sub, ClusterArgs& a) {
  ConfigMerge cfg(sub, a.config);
  merge_data_config(cfg, a.data);
  merge_model_config(cfg, a.model);
  cfg.merge("metric", "--metric", a.metrics);
  cfg.merge("save_coefficients", "--save-coefficients", a.save_coefficients);
  cfg.merge("save_affinity", "--save-affinity", a.save_affinity);
  cfg.merge("save_embedding", "--save-embedding", a.save_embedding);
  cfg.merge("out", "--out", a.out);
  cfg.finish();

  if (a.model.method.empty()) throw std::runtime_error("--method is required");
  if (a.out.empty()) throw std::runtime_error("--out is required");
  const cssc::Method method = cssc::parse_method(a.model.method);

  for (const std::string& m : a.metrics) {
    if (m != "err" && m != "rand_index" && m != "rie")
      throw std::runtime_error("unknown metric '" + m + "' (expected err, rand_index, or rie)");
    if ((m == "err" || m == "rand_index") && a.data.labels.empty())
      throw std::runtime_error("metric '" + m + "' needs ground-truth labels; supply --labels");
    if (m == "rie" && a.data.constraints.empty() && a.data.p < 0.0)
      throw std::runtime_error("metric 'rie' needs constraints; supply --constraints or --p");
  }

  const LoadedInputs in = load_inputs(a.data, cssc::method_uses_constraints(method));
  const cssc::PipelineOptions opts =
      build_pipeline_options(a.model, in.X, a.data.seed, method);

  const cssc::ClusteringResult result = cssc::run_method(
      method, in.X, in.cs, opts, resolve_alpha(a.model, method), a.model.t_max);

  const cssc::MetricsReport report =
      cssc::compute_metrics(result.labels, in.truth ? &*in.truth : nullptr,
                            in.cs.empty() ? nullptr : &in.cs);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  write_file_atomic(out / "labels.csv",
                    [&](const fs::path& p) { cssc::save_labels(result.labels, p); });
  write_json_atomic(out / "metrics.json", metrics_to_json(report));
  if (in.cs_sampled)
    write_file_atomic(out / "constraints.csv",
                      [&](const fs::path& p) { cssc::save_constraints(in.cs, p); });
  if (a.save_coefficients)
    write_file_atomic(out / "coefficients.csv",
                      [&](const fs::path& p) { cssc::save_matrix(result.coefficients, p); });
  if (a.save_affinity || a.save_embedding) {
    const cssc::AffinityMatrix A = cssc::affinity_from_coefficients(result.coefficients);
    if (a.save_affinity)
      write_file_atomic(out / "affinity.csv",
                        [&](const fs::path& p) { cssc::save_matrix(A.values, p); });
    if (a.save_embedding) {
      const Eigen::MatrixXd E = cssc::spectral_embedding(A, opts.n, opts.embedding);
      write_file_atomic(out / "embedding.csv",
                        [&](const fs::path& p) { cssc::save_matrix(E, p); });
    }
  }

  json run = data_to_json(a.data);
  run.update(model_to_json(a.model));
  run["command"] = "cluster";
  run["metric"] = a.metrics;
  run["save_coefficients"] = a.save_coefficients;
  run["save_affinity"] = a.save_affinity;
  run["save_embedding"] = a.save_embedding;
  run["out"] = a.out;
  run["iterations"] = result.iterations;
  run["converged"] = result.converged;
  run["effective_lambda"] = opts.solver.lambda;
  json artifacts = json::array({"labels.csv", "metrics.json"});
  if (in.cs_sampled) artifacts.push_back("constraints.csv");
  if (a.save_coefficients) artifacts.push_back("coefficients.csv");
  if (a.save_affinity) artifacts.push_back("affinity.csv");
  if (a.save_embedding) artifacts.push_back("embedding.csv");
  artifacts.push_back("run.json");
  run["artifacts"] = artifacts;
  write_json_atomic(out / "run.json", run);

  std::cout << "method=" << a.model.method << " n=" << a.model.n
            << " iterations=" << result.iterations
            << " converged=" << (result.converged ? "true" : "false");
  if (report.err) std::cout << " err=" << format_g(*report.err);
  if (report.rand_index_value) std::cout << " rand_index=" << format_g(*report.rand_index_value);
  if (report.rie) std::cout << " rie=" << format_g(*report.rie);
  std::cout << "\nartifacts written to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// trials

struct TrialsArgs {
  DataOpts data;
  ModelOpts model;
  std::vector<std::string> methods;
  int trials = 20;
  std::string out;
  std::string config;
};

int run_trials(CLI::App* sub, TrialsArgs& a) {
  ConfigMerge cfg(sub, a.config);
  merge_data_config(cfg, a.data);
  merge_model_config(cfg, a.model);
  cfg.merge("methods", "--methods", a.methods);
  cfg.merge("trials", "--trials", a.trials);
  cfg.merge("out", "--out", a.out);
  cfg.finish();

  if (a.out.empty()) throw std::runtime_error("--out is required");
  if (a.trials < 1) throw std::runtime_error("--trials must be >= 1");
  if (!a.data.constraints.empty())
    throw std::runtime_error("trials resamples constraints per trial; use --p, not --constraints");
  if (a.data.p < 0.0) throw std::runtime_error("trials requires --p");
  if (a.data.labels.empty())
    throw std::runtime_error("trials requires --labels (sampling and scoring need ground truth)");

  std::vector<std::string> method_names = a.methods;
  if (method_names.empty() && !a.model.method.empty()) method_names.push_back(a.model.method);
  if (method_names.empty())
    throw std::runtime_error("supply --methods m1,m2,... or a single --method");
  std::vector<cssc::Method> methods;
  for (const std::string& name : method_names) methods.push_back(cssc::parse_method(name));

  DataOpts base = a.data;
  base.constraints.clear();
  base.p = -1.0;  // constraints are resampled per trial below
  const LoadedInputs in = load_inputs(base, false);
  const cssc::Labels& truth = *in.truth;

  struct Row {
    std::vector<double> err;  // successful trials only
    std::vector<std::string> lines;
  };
  std::vector<Row> rows(methods.size());

  for (int t = 0; t < a.trials; ++t) {
    const std::uint64_t seed_t = a.data.seed + static_cast<std::uint64_t>(t);
    const cssc::ConstraintSet cs_t = cssc::sample_side_information(truth, a.data.p, seed_t);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const cssc::Method method = methods[mi];
      std::string err_field = "nan";
      std::string rie_field = "nan";
      int ok = 0;
      try {
        const cssc::PipelineOptions opts =
            build_pipeline_options(a.model, in.X, seed_t, method);
        const cssc::ClusteringResult result = cssc::run_method(
            method, in.X, cs_t, opts, resolve_alpha(a.model, method), a.model.t_max);
        const double err = cssc::clustering_error(result.labels, truth);
        rows[mi].err.push_back(err);
        err_field = format_g(err);
        if (!cs_t.empty())
          rie_field = format_g(cssc::rand_index_estimator(result.labels, cs_t));
        ok = 1;
      } catch (const std::exception& e) {
        std::cerr << "trial " << t << " method " << method_names[mi] << " failed: " << e.what()
                  << "\n";
      }
      rows[mi].lines.push_back(method_names[mi] + "," + std::to_string(t) + "," +
                               std::to_string(seed_t) + "," + err_field + "," + rie_field + "," +
                               std::to_string(ok));
    }
  }

  std::string summary = "method,mean_err,std_err\n";
  std::string summary_console;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stdev = std::numeric_limits<double>::quiet_NaN();
    if (!rows[mi].err.empty()) {
      mean = 0.0;
      for (double e : rows[mi].err) mean += e;
      mean /= static_cast<double>(rows[mi].err.size());
      stdev = sample_std(rows[mi].err, mean);
    }
    summary += method_names[mi] + "," + format_g(mean) + "," + format_g(stdev) + "\n";
    summary_console += method_names[mi] + ": mean_err=" + format_g(mean) +
                       " std_err=" + format_g(stdev) + " (" +
                       std::to_string(rows[mi].err.size()) + "/" + std::to_string(a.trials) +
                       " trials ok)\n";
  }
  std::string longform = "method,trial,seed,err,rie,ok\n";
  for (const Row& row : rows)
    for (const std::string& line : row.lines) longform += line + "\n";

  fs::create_directories(a.out);
  const fs::path out(a.out);
  write_text_atomic(out / "trials.csv", summary);
  write_text_atomic(out / "trials_long.csv", longform);

  json run = data_to_json(a.data);
  run.update(model_to_json(a.model));
  run["command"] = "trials";
  run["methods"] = method_names;
  run["trials"] = a.trials;
  run["out"] = a.out;
  run["artifacts"] = json::array({"trials.csv", "trials_long.csv", "run.json"});
  write_json_atomic(out / "run.json", run);

  std::cout << summary_console << "artifacts written to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// grid

struct GridArgs {
  DataOpts data;
  ModelOpts model;
  std::vector<double> lambda0_grid;
  std::vector<double> alpha_grid;
  int grid_seeds = 3;
  std::string out;
  std::string config;
};

int run_grid(CLI::App* sub, GridArgs& a) {
  ConfigMerge cfg(sub, a.config);
  merge_data_config(cfg, a.data);
  merge_model_config(cfg, a.model);
  cfg.merge("lambda0_grid", "--lambda0-grid", a.lambda0_grid);
  cfg.merge("alpha_grid", "--alpha-grid", a.alpha_grid);
  cfg.merge("grid_seeds", "--grid-seeds", a.grid_seeds);
  cfg.merge("out", "--out", a.out);
  cfg.finish();

  if (a.model.method.empty()) throw std::runtime_error("--method is required");
  if (a.out.empty()) throw std::runtime_error("--out is required");
  if (a.grid_seeds < 1) throw std::runtime_error("--grid-seeds must be >= 1");
  const cssc::Method method = cssc::parse_method(a.model.method);
  if (!cssc::method_uses_constraints(method) || cssc::method_is_lsr(method))
    throw std::runtime_error("grid scoring needs the restricted pairwise index, which requires a "
                             "constraint-consuming method (cssc, cssc_plus, cs3c, cs3c_plus)");

  const LoadedInputs in = load_inputs(a.data, true);
  if (in.cs.empty())
    throw std::runtime_error("the sampled/loaded constraint set is empty; grid cells "
                             "cannot be scored");

  cssc::GridSpec spec;
  spec.method = method;
  spec.lambda0_values =
      a.lambda0_grid.empty()
          ? std::vector<double>{2, 3, 4, 5, 6, 7, 8, 9, 10}
          : a.lambda0_grid;
  if (!a.alpha_grid.empty())
    spec.alpha_values = a.alpha_grid;
  else if (cssc::method_uses_alpha(method))
    spec.alpha_values = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.5, 2.0};
  else
    spec.alpha_values = {0.0};
  for (int i = 0; i < a.grid_seeds; ++i)
    spec.seeds.push_back(a.data.seed + static_cast<std::uint64_t>(i));
  spec.T_max = a.model.t_max;

  // A placeholder lambda keeps option validation happy; each cell overrides it
  // with the lambda0 scaling.
  ModelOpts cell_model = a.model;
  cell_model.lambda = -1.0;
  cell_model.lambda0 = -1.0;
  if (cell_model.alpha < 0.0) cell_model.alpha = 0.0;
  spec.base = [&] {
    ModelOpts probe = cell_model;
    probe.lambda = 1.0;
    return build_pipeline_options(probe, in.X, a.data.seed, method);
  }();

  const cssc::GridResult result =
      cssc::grid_search(in.X, in.cs, spec, in.truth ? &*in.truth : nullptr);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  write_file_atomic(out / "surface.csv",
                    [&](const fs::path& p) { cssc::export_surface(result.surface, p.string()); });
  if (in.cs_sampled)
    write_file_atomic(out / "constraints.csv",
                      [&](const fs::path& p) { cssc::save_constraints(in.cs, p); });

  json selected;
  selected["method"] = a.model.method;
  selected["lambda0"] = result.best_lambda0;
  selected["alpha"] = result.best_alpha;
  for (const cssc::GridCell& cell : result.surface.cells)
    if (cell.lambda0 == result.best_lambda0 && cell.alpha == result.best_alpha) {
      selected["mean_rie"] = cell.mean_rie;
      if (std::isfinite(cell.mean_err)) selected["mean_err"] = cell.mean_err;
    }
  write_json_atomic(out / "selected.json", selected);

  json run = data_to_json(a.data);
  run.update(model_to_json(a.model));
  run["command"] = "grid";
  run["lambda0_grid"] = spec.lambda0_values;
  run["alpha_grid"] = spec.alpha_values;
  run["grid_seeds"] = a.grid_seeds;
  run["out"] = a.out;
  json artifacts = json::array({"surface.csv", "selected.json"});
  if (in.cs_sampled) artifacts.push_back("constraints.csv");
  artifacts.push_back("run.json");
  run["artifacts"] = artifacts;
  write_json_atomic(out / "run.json", run);

  std::cout << "selected lambda0=" << format_g(result.best_lambda0)
            << " alpha=" << format_g(result.best_alpha) << " mean_rie="
            << format_g(selected["mean_rie"].get<double>()) << "\nartifacts written to " << a.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate-theorem

struct ValidateArgs {
  int n_points = 0;
  double p = -1.0;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

int run_validate(CLI::App* sub, ValidateArgs& a) {
  ConfigMerge cfg(sub, a.config);
  cfg.merge("n", "--n", a.n_points);
  cfg.merge("p", "--p", a.p);
  cfg.merge("trials", "--trials", a.trials);
  cfg.merge("seed", "--seed", a.seed);
  cfg.merge("out", "--out", a.out);
  cfg.finish();

  if (a.n_points < 2) throw std::runtime_error("--n (number of points) must be >= 2");
  if (a.p < 0.0) throw std::runtime_error("--p is required");

  const cssc::RieBoundReport report =
      cssc::validate_rie_bound(a.n_points, a.p, a.trials, a.seed);

  std::cout << "bound=" << format_g(report.bound)
            << " max_deviation=" << format_g(report.max_deviation)
            << " violation_rate=" << format_g(report.violation_rate) << " trials=" << a.trials
            << "\n";

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    const fs::path out(a.out);
    std::string csv = "trial,mu,mu_hat,deviation,bound\n";
    for (const cssc::RieTrialRecord& r : report.records)
      csv += std::to_string(r.trial) + "," + format_g(r.mu) + "," + format_g(r.mu_hat) + "," +
             format_g(r.deviation) + "," + format_g(report.bound) + "\n";
    write_text_atomic(out / "trials.csv", csv);

    json rj;
    rj["bound"] = report.bound;
    rj["max_deviation"] = report.max_deviation;
    rj["violation_rate"] = report.violation_rate;
    rj["trials"] = a.trials;
    write_json_atomic(out / "report.json", rj);

    json run;
    run["command"] = "validate-theorem";
    run["n"] = a.n_points;
    run["p"] = a.p;
    run["trials"] = a.trials;
    run["seed"] = a.seed;
    run["out"] = a.out;
    run["artifacts"] = json::array({"trials.csv", "report.json", "run.json"});
    write_json_atomic(out / "run.json", run);
    std::cout << "artifacts written to " << a.out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  int dims = 0;
  int clusters = 0;
  int subspace_dim = 0;
  int per_cluster = 0;
  double noise = 0.0;
  double p = -1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

int run_simulate(CLI::App* sub, SimulateArgs& a) {
  ConfigMerge cfg(sub, a.config);
  cfg.merge("dims", "--dims", a.dims);
  cfg.merge("n", "--n", a.clusters);
  cfg.merge("subspace_dim", "--subspace-dim", a.subspace_dim);
  cfg.merge("per_cluster", "--per-cluster", a.per_cluster);
  cfg.merge("noise", "--noise", a.noise);
  cfg.merge("p", "--p", a.p);
  cfg.merge("seed", "--seed", a.seed);
  cfg.merge("out", "--out", a.out);
  cfg.finish();

  if (a.out.empty()) throw std::runtime_error("--out is required");
  const cssc::SyntheticData synth = cssc::generate_union_of_subspaces(
      a.dims, a.clusters, a.subspace_dim, a.per_cluster, a.noise, a.seed);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  write_file_atomic(out / "data.csv",
                    [&](const fs::path& p) { cssc::save_matrix(synth.data.values, p); });
  write_file_atomic(out / "labels.csv",
                    [&](const fs::path& p) { cssc::save_labels(synth.truth, p); });
  bool wrote_constraints = false;
  if (a.p >= 0.0) {
    const cssc::ConstraintSet cs = cssc::sample_side_information(synth.truth, a.p, a.seed);
    write_file_atomic(out / "constraints.csv",
                      [&](const fs::path& p) { cssc::save_constraints(cs, p); });
    wrote_constraints = true;
  }

  json run;
  run["command"] = "simulate";
  run["dims"] = a.dims;
  run["n"] = a.clusters;
  run["subspace_dim"] = a.subspace_dim;
  run["per_cluster"] = a.per_cluster;
  run["noise"] = a.noise;
  run["p"] = a.p < 0.0 ? json(nullptr) : json(a.p);
  run["seed"] = a.seed;
  run["out"] = a.out;
  json artifacts = json::array({"data.csv", "labels.csv"});
  if (wrote_constraints) artifacts.push_back("constraints.csv");
  artifacts.push_back("run.json");
  run["artifacts"] = artifacts;
  write_json_atomic(out / "run.json", run);

  std::cout << "wrote " << a.dims << "x" << (a.clusters * a.per_cluster) << " matrix, "
            << a.clusters << " clusters\nartifacts written to " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse subspace clustering with pairwise constraints"};
  app.require_subcommand(1);

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand("cluster", "Cluster one dataset and report metrics");
  add_data_flags(cluster, cluster_args.data);
  add_model_flags(cluster, cluster_args.model);
  cluster->add_option("--metric", cluster_args.metrics, "Metrics that must be computed")
      ->delimiter(',');
  cluster->add_flag("--save-coefficients", cluster_args.save_coefficients,
                    "Also write the coefficient matrix");
  cluster->add_flag("--save-affinity", cluster_args.save_affinity, "Also write the affinity");
  cluster->add_flag("--save-embedding", cluster_args.save_embedding,
                    "Also write the spectral embedding");
  cluster->add_option("--out", cluster_args.out, "Output directory");
  cluster->add_option("--config", cluster_args.config, "JSON config file (flags override it)");

  TrialsArgs trials_args;
  CLI::App* trials = app.add_subcommand(
      "trials", "Repeatedly resample constraints and summarize error per method");
  add_data_flags(trials, trials_args.data);
  add_model_flags(trials, trials_args.model);
  trials->add_option("--methods", trials_args.methods, "Comma-separated method list")
      ->delimiter(',');
  trials->add_option("--trials", trials_args.trials, "Number of trials");
  trials->add_option("--out", trials_args.out, "Output directory");
  trials->add_option("--config", trials_args.config, "JSON config file (flags override it)");

  GridArgs grid_args;
  CLI::App* grid = app.add_subcommand(
      "grid", "Sweep (lambda0, alpha), score by the restricted pairwise index");
  add_data_flags(grid, grid_args.data);
  add_model_flags(grid, grid_args.model);
  grid->add_option("--lambda0-grid", grid_args.lambda0_grid, "lambda0 values")->delimiter(',');
  grid->add_option("--alpha-grid", grid_args.alpha_grid, "alpha values")->delimiter(',');
  grid->add_option("--grid-seeds", grid_args.grid_seeds, "Seeds per cell (base seed + i)");
  grid->add_option("--out", grid_args.out, "Output directory");
  grid->add_option("--config", grid_args.config, "JSON config file (flags override it)");

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate-theorem",
      "Monte-Carlo check of the restricted-index deviation bound on random labelings");
  validate->add_option("--n", validate_args.n_points, "Number of points");
  validate->add_option("--p", validate_args.p, "Observation probability per pair");
  validate->add_option("--trials", validate_args.trials, "Number of Monte-Carlo trials");
  validate->add_option("--seed", validate_args.seed, "Base seed");
  validate->add_option("--out", validate_args.out, "Optional output directory");
  validate->add_option("--config", validate_args.config, "JSON config file (flags override it)");

  SimulateArgs simulate_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Generate a union-of-subspaces synthetic dataset");
  simulate->add_option("--dims", simulate_args.dims, "Ambient dimension");
  simulate->add_option("--n", simulate_args.clusters, "Number of subspaces/clusters");
  simulate->add_option("--subspace-dim", simulate_args.subspace_dim, "Dimension of each subspace");
  simulate->add_option("--per-cluster", simulate_args.per_cluster, "Points per subspace");
  simulate->add_option("--noise", simulate_args.noise, "Additive Gaussian noise level");
  simulate->add_option("--p", simulate_args.p, "Also sample constraints at this rate");
  simulate->add_option("--seed", simulate_args.seed, "Base seed");
  simulate->add_option("--out", simulate_args.out, "Output directory");
  simulate->add_option("--config", simulate_args.config, "JSON config file (flags override it)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) return run_cluster(cluster, cluster_args);
    if (trials->parsed()) return run_trials(trials, trials_args);
    if (grid->parsed()) return run_grid(grid, grid_args);
    if (validate->parsed()) return run_validate(validate, validate_args);
    if (simulate->parsed()) return run_simulate(simulate, simulate_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
