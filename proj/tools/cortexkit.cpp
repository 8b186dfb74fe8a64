#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cortexkit/commands.hpp"
#include "cortexkit/errors.hpp"
#include "cortexkit/io.hpp"

namespace cli = cortexkit::cli;
using cli::json;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("cortexkit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CORTEXKIT_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

json config_or_empty(const std::string& path) { return path.empty() ? json() : cli::load_json(path); }

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"cortexkit: fMRI brain network analysis pipeline"};
  app.require_subcommand(1);

  cli::Common common;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Global random seed");
    sub->add_option("--jobs", common.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  };

  std::string manifest, config;

  auto* augment = app.add_subcommand("augment", "Augment BOLD time series");
  std::string aug_method;
  std::optional<double> aug_ratio, aug_mean, aug_std;
  augment->add_option("--manifest", manifest, "Subject manifest JSON")->required();
  augment->add_option("--config", config, "AugmentSpec JSON");
  augment->add_option("--method", aug_method, "upsample | downsample | slice | jitter");
  augment->add_option("--ratio", aug_ratio, "u, b or s");
  augment->add_option("--noise-mean", aug_mean);
  augment->add_option("--noise-std", aug_std);
  add_common(augment);

  auto* construct = app.add_subcommand("construct", "Build brain networks");
  std::string con_method;
  std::optional<double> con_lambda, con_top;
  bool con_binarize = false, con_dense = false;
  construct->add_option("--manifest", manifest, "Subject manifest JSON")->required();
  construct->add_option("--config", config, "ConstructSpec JSON");
  construct->add_option("--method", con_method, "pearson | mutual_info | partial_corr | spearman | hofc | sparse_rep | lowrank_rep");
  construct->add_option("--lambda", con_lambda);
  construct->add_option("--top-percent", con_top, "Sparsity K (percent kept)");
  construct->add_flag("--binarize", con_binarize);
  construct->add_flag("--no-sparsify", con_dense);
  add_common(construct);

  auto* features = app.add_subcommand("features", "Extract network features");
  std::vector<std::string> selection;
  features->add_option("--manifest", manifest, "graphs.json written by construct")->required();
  features->add_option("--config", config, "JSON with a \"selection\" array");
  features->add_option("--select", selection, "Feature names, or 'all'")->delimiter(',');
  add_common(features);

  auto* mlcmd = app.add_subcommand("ml", "Cross-validated classification or regression");
  std::string dataset, task = "classification", model;
  std::optional<std::size_t> folds;
  mlcmd->add_option("--manifest", dataset, "Dataset CSV (target,site,f0,...)")->required();
  mlcmd->add_option("--config", config, "MlSpec JSON");
  mlcmd->add_option("--task", task)->capture_default_str();
  mlcmd->add_option("--model", model, "svm | logistic | knn | mlp");
  mlcmd->add_option("--folds", folds);
  add_common(mlcmd);

  auto* fedcmd = app.add_subcommand("fed", "Federated learning simulation");
  fedcmd->add_option("--manifest", manifest, "Federation manifest JSON")->required();
  add_common(fedcmd);

  auto* viz = app.add_subcommand("viz", "Adjacency heatmap and topology SVGs");
  std::string graph;
  bool simulate = false;
  viz->add_option("--manifest", graph, "Graph CSV");
  viz->add_flag("--simulate", simulate, "Use a simulated 10-region, 30-timepoint Pearson network (K=50)");
  add_common(viz);

  auto* pipeline = app.add_subcommand("pipeline", "Run stages from a PipelineConfig JSON");
  std::optional<std::string> pipe_out;
  std::optional<std::size_t> pipe_jobs;
  pipeline->add_option("--config", config, "PipelineConfig JSON")->required();
  pipeline->add_option("--seed", seed);
  pipeline->add_option("--out", pipe_out);
  pipeline->add_option("--jobs", pipe_jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    common.out = out;
    common.seed = seed.value_or(0);
    if (augment->parsed()) {
      json j = config_or_empty(config);
      if (j.is_null()) j = json::object();
      if (!aug_method.empty()) j["method"] = aug_method;
      if (aug_ratio) j["ratio"] = *aug_ratio;
      if (aug_mean) j["noise_mean"] = *aug_mean;
      if (aug_std) j["noise_std"] = *aug_std;
      cli::cmd_augment(manifest, cli::parse_augment_spec(j), common);
    } else if (construct->parsed()) {
      json j = config_or_empty(config);
      if (j.is_null()) j = json::object();
      if (!con_method.empty()) j["method"] = con_method;
      if (con_lambda) j["lambda"] = *con_lambda;
      if (con_dense) {
        j["sparsify"] = false;
      } else if (con_top || con_binarize) {
        json sp = j.contains("sparsify") && j["sparsify"].is_object() ? j["sparsify"] : json::object();
        if (con_top) sp["top_percent"] = *con_top;
        if (con_binarize) sp["binarize"] = true;
        j["sparsify"] = sp;
      }
      cli::cmd_construct(manifest, cli::parse_construct_spec(j), common);
    } else if (features->parsed()) {
      json sel;
      if (!config.empty()) sel = cli::load_json(config).value("selection", json());
      if (!selection.empty()) sel = selection.size() == 1 && selection[0] == "all" ? json("all") : json(selection);
      cli::cmd_features(manifest, cli::parse_selection(sel), common);
    } else if (mlcmd->parsed()) {
      json j = config_or_empty(config);
      if (j.is_null()) j = json::object();
      if (!model.empty()) j["model"] = model;
      if (folds) j["folds"] = *folds;
      if (j.contains("task")) task = j["task"].get<std::string>();
      cli::cmd_ml(dataset, cortexkit::ml::parse_task(task), cli::parse_ml_spec(j), common);
    } else if (fedcmd->parsed()) {
      cli::cmd_fed(manifest, seed, common);
    } else if (viz->parsed()) {
      if (simulate == !graph.empty()) throw cortexkit::ConfigError("viz needs exactly one of --manifest or --simulate");
      if (simulate) {
        const auto g = cli::simulated_network(common.seed);
        cortexkit::io::save_graph_csv(g, common.out / "graph.csv");
        cli::cmd_viz(g, common);
      } else {
        cli::cmd_viz(cortexkit::io::load_graph_csv(graph), common);
      }
    } else if (pipeline->parsed()) {
      std::optional<std::filesystem::path> po;
      if (pipe_out) po = *pipe_out;
      cli::cmd_pipeline(config, seed, po, pipe_jobs);
    }
  } catch (const cortexkit::Error& e) {
    spdlog::error("{}", e.what());
    return e.is_input_error() ? 1 : 2;
  } catch (const std::exception& e) {
    spdlog::critical("internal error: {}", e.what());
    return 2;
  }
  return 0;
}
