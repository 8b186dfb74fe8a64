#include "cortexkit/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "cortexkit/errors.hpp"
#include "cortexkit/features.hpp"
#include "cortexkit/io.hpp"
#include "cortexkit/svg.hpp"

namespace cortexkit::cli {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (j.is_null()) return;
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + what);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (j.is_null() || !j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& target) {
  if (j.is_null() || !j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v);
  target = v;
}

std::string safe_name(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.find_first_of("/\\") != std::string::npos) {
    throw ManifestError("subject id '" + id + "' cannot be used as a file name");
  }
  return id;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The error of the lowest
// failing index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <typename Fn>
auto with_subject(const std::string& id, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error("subject '" + id + "': " + e.what(), e.is_input_error());
  }
}

std::vector<double> upper_triangle(const Matrix& a) {
  std::vector<double> out;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

ml::LabeledDataset dataset_from_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& targets,
                                     const std::vector<std::string>& sites) {
  ml::LabeledDataset ds;
  ds.features = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != ds.features.cols()) throw DimensionError("subjects differ in feature width");
    std::copy(rows[r].begin(), rows[r].end(), ds.features.row(r).begin());
  }
  ds.targets = targets;
  if (std::any_of(sites.begin(), sites.end(), [](const std::string& s) { return !s.empty(); })) ds.site_ids = sites;
  return ds;
}

}  // namespace

// ---- spec parsing -----------------------------------------------------------

json load_json(const fs::path& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ParseError&) {
    throw ConfigError("cannot open " + path.string());
  }
}

bold::AugmentSpec parse_augment_spec(const json& j) {
  check_keys(j, {"stage", "method", "ratio", "noise_mean", "noise_std"}, "augment spec");
  bold::AugmentSpec s;
  std::string method = bold::to_string(s.method);
  read(j, "method", method);
  s.method = bold::parse_method(method);
  read(j, "ratio", s.ratio);
  read(j, "noise_mean", s.noise_mean);
  read(j, "noise_std", s.noise_std);
  return s;
}

construct::ConstructSpec parse_construct_spec(const json& j) {
  check_keys(j, {"stage", "method", "lambda", "n_bins", "ridge", "solver_tol", "solver_max_iters", "sparsify"},
             "construct spec");
  construct::ConstructSpec s;
  s.sparsify = construct::SparsifySpec{};
  std::string method = construct::to_string(s.method);
  read(j, "method", method);
  s.method = construct::parse_method(method);
  read(j, "lambda", s.lambda);
  read(j, "n_bins", s.n_bins);
  read_optional(j, "ridge", s.ridge);
  read(j, "solver_tol", s.solver_tol);
  read(j, "solver_max_iters", s.solver_max_iters);
  if (!j.is_null() && j.contains("sparsify")) {
    const json& sp = j["sparsify"];
    if (sp.is_null() || (sp.is_boolean() && !sp.get<bool>())) {
      s.sparsify.reset();
    } else if (!sp.is_boolean()) {
      check_keys(sp, {"top_percent", "binarize", "by_magnitude"}, "sparsify spec");
      read(sp, "top_percent", s.sparsify->top_percent);
      read(sp, "binarize", s.sparsify->binarize);
      read(sp, "by_magnitude", s.sparsify->by_magnitude);
    }
  }
  return s;
}

std::vector<std::string> parse_selection(const json& j) {
  std::vector<std::string> all = features::kNodeFeatureNames;
  all.insert(all.end(), features::kGraphFeatureNames.begin(), features::kGraphFeatureNames.end());
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "all")) return all;
  if (!j.is_array()) throw ConfigError("feature selection must be \"all\" or an array of names");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError("feature names must be strings");
    const auto name = v.get<std::string>();
    if (std::find(all.begin(), all.end(), name) == all.end()) throw ConfigError("unknown network feature '" + name + "'");
    out.push_back(name);
  }
  if (out.empty()) throw ConfigError("feature selection is empty");
  return out;
}

ml::MlSpec parse_ml_spec(const json& j) {
  check_keys(j, {"stage", "task", "model", "folds", "train_percent", "pca_dims", "standardize", "svm_c", "epochs", "l2",
                 "knn_k", "hidden", "lr", "batch"},
             "ml spec");
  ml::MlSpec s;
  std::string model = ml::to_string(s.model);
  read(j, "model", model);
  s.model = ml::parse_model(model);
  read(j, "folds", s.folds);
  read_optional(j, "train_percent", s.train_percent);
  read_optional(j, "pca_dims", s.pca_dims);
  read(j, "standardize", s.standardize);
  read(j, "svm_c", s.svm_c);
  read(j, "epochs", s.epochs);
  read(j, "l2", s.l2);
  read(j, "knn_k", s.knn_k);
  read(j, "hidden", s.hidden);
  read(j, "lr", s.lr);
  read(j, "batch", s.batch);
  return s;
}

fed::FedConfig parse_fed_config(const json& j) {
  check_keys(j, {"stage", "strategy", "rounds", "mu", "moon_weight", "moon_temp", "seed", "hidden", "folds",
                 "pfedme_inner_iters", "pfedme_inner_lr", "pfedme_beta", "local_epochs", "lr", "batch"},
             "fed config");
  fed::FedConfig c;
  std::string strategy = fed::to_string(c.strategy);
  read(j, "strategy", strategy);
  c.strategy = fed::parse_strategy(strategy);
  read(j, "rounds", c.rounds);
  read(j, "mu", c.mu);
  read(j, "moon_weight", c.moon_weight);
  read(j, "moon_temp", c.moon_temp);
  read(j, "seed", c.seed);
  read(j, "hidden", c.hidden);
  read(j, "folds", c.folds);
  read(j, "pfedme_inner_iters", c.pfedme_inner_iters);
  read(j, "pfedme_inner_lr", c.pfedme_inner_lr);
  read(j, "pfedme_beta", c.pfedme_beta);
  fed::validate(c);
  return c;
}

// ---- augment ----------------------------------------------------------------

fs::path cmd_augment(const fs::path& manifest, const bold::AugmentSpec& spec, const Common& c) {
  const auto records = io::load_manifest(manifest);
  const SeededRng root = SeededRng(c.seed, "pipeline").fork("augment");
  std::vector<io::SubjectRecord> out_records(records.size());
  std::vector<json> log(records.size());
  parallel_for(records.size(), c.jobs, [&](std::size_t i) {
    const auto& rec = records[i];
    with_subject(rec.subject_id, [&] {
      const auto loaded = io::load_timeseries(rec.series_path);
      SeededRng rng = root.fork("subject:" + rec.subject_id);
      const TimeSeries result = bold::apply(loaded.series, spec, rng);
      const fs::path dest = c.out / "series" / (safe_name(rec.subject_id) + ".csv");
      io::save_timeseries_csv(result, dest, loaded.header);
      out_records[i] = rec;
      out_records[i].series_path = dest;
      log[i] = {{"subject_id", rec.subject_id},       {"method", bold::to_string(spec.method)},
                {"ratio", spec.ratio},                {"noise_mean", spec.noise_mean},
                {"noise_std", spec.noise_std},        {"regions", result.regions()},
                {"timepoints_in", loaded.series.timepoints()}, {"timepoints_out", result.timepoints()}};
      spdlog::info("augment {}: {} timepoints -> {}", rec.subject_id, loaded.series.timepoints(), result.timepoints());
      return 0;
    });
  });
  io::save_manifest(out_records, c.out / "manifest.json");
  io::write_file_atomic(c.out / "augment_log.json", json(log).dump(2) + "\n");
  return c.out / "manifest.json";
}

// ---- construct ----------------------------------------------------------------

fs::path cmd_construct(const fs::path& manifest, const construct::ConstructSpec& spec, const Common& c) {
  const auto records = io::load_manifest(manifest);
  std::vector<json> entries(records.size());
  std::vector<std::vector<double>> rows(records.size());
  parallel_for(records.size(), c.jobs, [&](std::size_t i) {
    const auto& rec = records[i];
    with_subject(rec.subject_id, [&] {
      const TimeSeries ts = io::load_timeseries_csv(rec.series_path);
      const auto built = construct::build(ts, spec);
      const std::string file = "graphs/" + safe_name(rec.subject_id) + ".csv";
      io::save_graph_csv(built.graph, c.out / file);
      json e = {{"subject_id", rec.subject_id},
                {"graph_path", file},
                {"method", construct::to_string(spec.method)},
                {"nodes", built.graph.n_nodes()},
                {"edges", built.graph.edge_count()}};
      if (rec.label) e["label"] = *rec.label;
      if (rec.site_id) e["site_id"] = *rec.site_id;
      if (built.solver) {
        const auto& s = *built.solver;
        e["solver"] = {{"iterations", s.iterations},
                       {"converged", s.converged},
                       {"final_objective", s.objective_trace.empty() ? 0.0 : s.objective_trace.back()},
                       {"warning", s.warning}};
        if (!s.converged) spdlog::warn("construct {}: {}", rec.subject_id, s.warning);
      }
      entries[i] = std::move(e);
      rows[i] = upper_triangle(built.graph.adjacency());
      spdlog::info("construct {}: {} edges", rec.subject_id, built.graph.edge_count());
      return 0;
    });
  });
  io::write_file_atomic(c.out / "graphs.json", json(entries).dump(2) + "\n");

  const bool labelled = !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.label.has_value(); });
  if (labelled) {
    std::vector<double> targets;
    std::vector<std::string> sites;
    for (const auto& r : records) targets.push_back(*r.label), sites.push_back(r.site_id.value_or(""));
    io::save_dataset_csv(dataset_from_rows(rows, targets, sites), c.out / "connectivity.csv");
  }
  return c.out / "graphs.json";
}

std::vector<GraphRecord> load_graph_manifest(const fs::path& path) {
  const json j = load_json(path);
  if (!j.is_array()) throw ManifestError(path.string() + ": expected a JSON array");
  std::vector<GraphRecord> out;
  std::set<std::string> seen;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("subject_id") || !e.contains("graph_path")) {
      throw ManifestError(path.string() + ": each record needs subject_id and graph_path");
    }
    GraphRecord r;
    r.subject_id = e["subject_id"].get<std::string>();
    if (!seen.insert(r.subject_id).second) throw ManifestError("duplicate subject_id '" + r.subject_id + "'");
    const fs::path p = e["graph_path"].get<std::string>();
    r.graph_path = p.is_absolute() ? p : (path.parent_path() / p).lexically_normal();
    if (!fs::is_regular_file(r.graph_path)) throw ManifestError("subject '" + r.subject_id + "': " + r.graph_path.string() + " not found");
    if (e.contains("label") && e["label"].is_number()) r.label = e["label"].get<double>();
    if (e.contains("site_id") && e["site_id"].is_string()) r.site_id = e["site_id"].get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

// ---- features -----------------------------------------------------------------

fs::path cmd_features(const fs::path& graph_manifest, const std::vector<std::string>& selection, const Common& c) {
  const auto records = load_graph_manifest(graph_manifest);
  std::vector<std::string> node_sel, graph_sel;
  for (const auto& name : selection) {
    if (std::find(features::kNodeFeatureNames.begin(), features::kNodeFeatureNames.end(), name) !=
        features::kNodeFeatureNames.end()) {
      node_sel.push_back(name);
    } else if (std::find(features::kGraphFeatureNames.begin(), features::kGraphFeatureNames.end(), name) !=
               features::kGraphFeatureNames.end()) {
      graph_sel.push_back(name);
    } else {
      throw ConfigError("unknown network feature '" + name + "'");
    }
  }
  if (node_sel.empty() && graph_sel.empty()) throw ConfigError("feature selection is empty");

  std::vector<features::GraphFeatureSet> summaries(records.size());
  std::vector<std::vector<double>> rows(records.size());
  parallel_for(records.size(), c.jobs, [&](std::size_t i) {
    const auto& rec = records[i];
    with_subject(rec.subject_id, [&] {
      const BrainGraph g = io::load_graph_csv(rec.graph_path);
      const std::string stem = safe_name(rec.subject_id);
      std::vector<double>& row = rows[i];
      if (!graph_sel.empty()) {
        summaries[i] = features::graph_features(g, graph_sel);
        io::write_file_atomic(c.out / "features" / (stem + "_graph.csv"), io::format_graph_features(summaries[i]));
        if (!summaries[i].community_assignment.empty()) {
          std::string s = "node,community\n";
          for (std::size_t k = 0; k < summaries[i].community_assignment.size(); ++k)
            s += std::to_string(k) + "," + std::to_string(summaries[i].community_assignment[k]) + "\n";
          io::write_file_atomic(c.out / "features" / (stem + "_communities.csv"), s);
        }
        for (double v : summaries[i].values) row.push_back(std::isnan(v) ? 0.0 : v);
      }
      if (!node_sel.empty()) {
        const auto table = features::node_features(g, node_sel);
        io::write_file_atomic(c.out / "features" / (stem + "_nodes.csv"), io::format_node_features(table));
        for (const auto& col : table.columns) row.insert(row.end(), col.begin(), col.end());
      }
      return 0;
    });
  });

  if (!graph_sel.empty()) {
    std::string s = "subject_id";
    for (const auto& n : summaries.front().names) s += "," + n;
    s += '\n';
    for (std::size_t i = 0; i < records.size(); ++i) {
      s += records[i].subject_id;
      for (double v : summaries[i].values) s += "," + io::format_real(v);
      s += '\n';
    }
    io::write_file_atomic(c.out / "graph_features.csv", s);
  }
  const bool labelled = !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.label.has_value(); });
  if (labelled) {
    std::vector<double> targets;
    std::vector<std::string> sites;
    for (const auto& r : records) targets.push_back(*r.label), sites.push_back(r.site_id.value_or(""));
    io::save_dataset_csv(dataset_from_rows(rows, targets, sites), c.out / "features.csv");
  }
  return c.out;
}

// ---- ml ---------------------------------------------------------------------------

ml::CvResult run_ml(const ml::LabeledDataset& ds, const ml::MlSpec& spec, std::uint64_t seed) {
  const SeededRng root(seed, "pipeline");
  std::string site = "all";
  if (!ds.site_ids.empty() &&
      std::all_of(ds.site_ids.begin(), ds.site_ids.end(), [&](const std::string& s) { return s == ds.site_ids.front(); })) {
    site = ds.site_ids.front();
  }
  return ml::cross_validate(ds, spec, root.fork("site:" + site), root.fork("init"));
}

json report_json(const ml::EvalReport& r) {
  json j = {{"task", ml::to_string(r.task)}, {"n", r.n}};
  if (r.task == ml::Task::regression) {
    j["mae"] = r.mae;
    j["mse"] = r.mse;
    j["ccc"] = r.ccc;
    return j;
  }
  for (const auto& name : ml::metric_names(r.task)) j[name] = ml::metric_value(r, name);
  j["confusion"] = {{"tp", r.confusion.tp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}, {"fp", r.confusion.fp}};
  json roc = json::array();
  for (const auto& [f, t] : r.roc_points) roc.push_back({f, t});
  j["roc_points"] = roc;
  return j;
}

json cv_json(const ml::CvResult& cv, const ml::MlSpec& spec, ml::Task task) {
  json metrics = json::object();
  for (const auto& [name, s] : cv.summary) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f±%.4f", s.mean, s.std);
    metrics[name] = {{"mean", s.mean}, {"std", s.std},
                     {"formatted", task == ml::Task::classification ? ml::format_percent(s) : std::string(buf)}};
  }
  json folds = json::array();
  for (const auto& r : cv.folds) folds.push_back(report_json(r));
  return {{"model", ml::to_string(spec.model)},
          {"task", ml::to_string(task)},
          {"folds", cv.folds.size()},
          {"metrics", metrics},
          {"pooled", report_json(cv.pooled)},
          {"fold_reports", folds}};
}

fs::path cmd_ml(const fs::path& dataset, ml::Task task, const ml::MlSpec& spec, const Common& c) {
  const auto ds = io::load_dataset_csv(dataset, task);
  const auto cv = run_ml(ds, spec, c.seed);
  io::write_file_atomic(c.out / "report.json", cv_json(cv, spec, task).dump(2) + "\n");
  std::string pred = "sample,truth,score,prediction\n";
  for (std::size_t k = 0; k < cv.oof_index.size(); ++k) {
    pred += std::to_string(cv.oof_index[k]) + "," + io::format_real(ds.targets[cv.oof_index[k]]) + "," +
            io::format_real(cv.oof_scores[k]) + "," + io::format_real(cv.oof_labels[k]) + "\n";
  }
  io::write_file_atomic(c.out / "predictions.csv", pred);
  if (task == ml::Task::classification) {
    io::write_file_atomic(c.out / "confusion.svg", viz::confusion_matrix(cv.pooled));
    io::write_file_atomic(c.out / "roc.svg", viz::roc_curve(cv.pooled));
  }
  for (const auto& [name, s] : cv.summary) spdlog::info("ml {}: {} ± {}", name, s.mean, s.std);
  return c.out / "report.json";
}

// ---- fed ----------------------------------------------------------------------------

fs::path cmd_fed(const fed::FedConfig& cfg, const std::vector<fed::SiteShard>& shards, const Common& c) {
  const auto result = fed::run_federation(cfg, shards);
  io::write_file_atomic(c.out / "trace.csv", io::format_trace_csv(result.trace));
  json sites = json::object();
  for (const auto& [id, r] : result.site_reports) sites[id] = report_json(r);
  const json j = {{"strategy", fed::to_string(cfg.strategy)},
                  {"rounds", cfg.rounds},
                  {"seed", cfg.seed},
                  {"total_bytes", result.trace.total_bytes()},
                  {"sites", sites},
                  {"average", report_json(result.average)}};
  io::write_file_atomic(c.out / "reports.json", j.dump(2) + "\n");
  spdlog::info("fed {}: average balanced accuracy {}", fed::to_string(cfg.strategy), result.average.balanced_accuracy);
  return c.out / "reports.json";
}

fs::path cmd_fed(const fs::path& fed_manifest, std::optional<std::uint64_t> seed_override, const Common& c) {
  auto ex = io::load_fed_manifest(fed_manifest);
  if (seed_override) ex.config.seed = *seed_override;
  return cmd_fed(ex.config, ex.shards, c);
}

// ---- viz ------------------------------------------------------------------------------

TimeSeries simulate_series(std::uint64_t seed, std::size_t regions, std::size_t timepoints) {
  SeededRng rng(seed, "simulate");
  constexpr std::size_t kLatent = 3;
  Matrix latent(timepoints, kLatent);
  for (double& v : latent.data()) v = rng.normal(0.0, 1.0);
  Matrix x(timepoints, regions);
  for (std::size_t t = 0; t < timepoints; ++t)
    for (std::size_t r = 0; r < regions; ++r) x(t, r) = latent(t, r % kLatent) + rng.normal(0.0, 0.8);
  return TimeSeries(std::move(x));
}

BrainGraph simulated_network(std::uint64_t seed) {
  return construct::sparsify(construct::pearson(simulate_series(seed)), 50.0, false);
}

fs::path cmd_viz(const BrainGraph& g, const Common& c) {
  io::write_file_atomic(c.out / "heatmap.svg", viz::adjacency_heatmap(g));
  io::write_file_atomic(c.out / "topology.svg", viz::topology(g));
  return c.out;
}

// ---- pipeline ---------------------------------------------------------------------------

fs::path cmd_pipeline(const fs::path& config, std::optional<std::uint64_t> seed_override,
                      std::optional<fs::path> out_override, std::optional<std::size_t> jobs_override) {
  const json j = load_json(config);
  check_keys(j, {"manifest", "seed", "out", "jobs", "stages"}, "pipeline config");
  const fs::path base = config.parent_path();
  auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : (base / p).lexically_normal(); };

  std::string manifest_str, out_str = "out";
  read(j, "manifest", manifest_str);
  read(j, "out", out_str);
  if (manifest_str.empty()) throw ConfigError("pipeline config needs a manifest");
  Common common;
  read(j, "seed", common.seed);
  read(j, "jobs", common.jobs);
  common.out = resolve(out_str);
  if (seed_override) common.seed = *seed_override;
  if (out_override) common.out = *out_override;
  if (jobs_override) common.jobs = *jobs_override;

  if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty()) throw ConfigError("pipeline needs stages");
  const std::map<std::string, int> rank = {{"augment", 0}, {"construct", 1}, {"features", 2}, {"ml", 3}, {"fed", 3}};
  int last = -1;
  bool constructed = false;
  for (const auto& st : j["stages"]) {
    if (!st.is_object() || !st.contains("stage") || !st["stage"].is_string()) throw ConfigError("each stage needs a \"stage\" name");
    const auto name = st["stage"].get<std::string>();
    const auto it = rank.find(name);
    if (it == rank.end()) throw ConfigError("unknown stage '" + name + "'");
    if (it->second <= last) throw ConfigError("stage '" + name + "' is out of order or repeated");
    if (it->second >= 2 && !constructed) throw ConfigError("stage '" + name + "' needs a construct stage before it");
    constructed = constructed || name == "construct";
    last = it->second;
  }

  fs::path manifest = resolve(manifest_str);
  fs::path graphs, dataset;
  for (const auto& st : j["stages"]) {
    const auto name = st["stage"].get<std::string>();
    Common c = common;
    c.out = common.out / name;
    spdlog::info("pipeline: stage {}", name);
    if (name == "augment") {
      manifest = cmd_augment(manifest, parse_augment_spec(st), c);
    } else if (name == "construct") {
      graphs = cmd_construct(manifest, parse_construct_spec(st), c);
      dataset = c.out / "connectivity.csv";
    } else if (name == "features") {
      cmd_features(graphs, parse_selection(st.contains("selection") ? st["selection"] : json()), c);
      dataset = c.out / "features.csv";
    } else {
      if (!fs::is_regular_file(dataset)) throw ConfigError("stage '" + name + "' needs labelled subjects");
      if (name == "ml") {
        std::string task = "classification";
        read(st, "task", task);
        cmd_ml(dataset, ml::parse_task(task), parse_ml_spec(st), c);
      } else {
        fed::FedConfig cfg = parse_fed_config(st);
        cfg.seed = common.seed;
        const auto ds = io::load_dataset_csv(dataset, ml::Task::classification);
        if (ds.site_ids.empty()) throw ConfigError("fed stage needs site ids on every subject");
        fed::SiteShard defaults;
        std::size_t local_epochs = defaults.local_epochs, batch = defaults.batch;
        double lr = defaults.lr;
        read(st, "local_epochs", local_epochs);
        read(st, "lr", lr);
        read(st, "batch", batch);
        std::vector<std::string> order;
        for (const auto& s : ds.site_ids)
          if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
        std::vector<fed::SiteShard> shards;
        for (const auto& site : order) {
          std::vector<std::size_t> idx;
          for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds.site_ids[i] == site) idx.push_back(i);
          shards.push_back({site, ds.subset(idx), local_epochs, lr, batch});
        }
        cmd_fed(cfg, shards, c);
      }
    }
  }
  return common.out;
}

}  // namespace cortexkit::cli
