#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cortexkit/bold_augment.hpp"
#include "cortexkit/construct.hpp"
#include "cortexkit/fed.hpp"
#include "cortexkit/ml.hpp"

namespace cortexkit::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Common {
  fs::path out = "out";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;  // 0 = one per hardware thread
};

// Stage specs from JSON objects. Unknown keys throw ConfigError.
bold::AugmentSpec parse_augment_spec(const json& j);
construct::ConstructSpec parse_construct_spec(const json& j);
std::vector<std::string> parse_selection(const json& j);
ml::MlSpec parse_ml_spec(const json& j);
fed::FedConfig parse_fed_config(const json& j);
json load_json(const fs::path& path);

// Writes series/<subject>.csv, manifest.json and augment_log.json under out.
// Subject s draws from SeededRng(seed, "pipeline").fork("augment").fork("subject:<id>").
fs::path cmd_augment(const fs::path& manifest, const bold::AugmentSpec& spec, const Common& c);

// Writes graphs/<subject>.csv, graphs.json (with solver metadata for SR/LR)
// and, when every subject is labelled, connectivity.csv holding the
// flattened upper triangles.
fs::path cmd_construct(const fs::path& manifest, const construct::ConstructSpec& spec, const Common& c);

struct GraphRecord {
  std::string subject_id;
  fs::path graph_path;
  std::optional<double> label;
  std::optional<std::string> site_id;
};
std::vector<GraphRecord> load_graph_manifest(const fs::path& path);

// Writes features/<subject>_nodes.csv, features/<subject>_graph.csv,
// features/<subject>_communities.csv (when modularity is selected),
// graph_features.csv, and features.csv as an ML dataset when every subject
// is labelled. Undefined measures are written as nan in the tables and as 0
// in the dataset.
fs::path cmd_features(const fs::path& graph_manifest, const std::vector<std::string>& selection, const Common& c);

// The random streams match fed::run_federation for a dataset whose samples
// share one site id: rng = root.fork("site:<id>") ("site:all" otherwise),
// init = root.fork("init"), root = SeededRng(seed, "pipeline").
ml::CvResult run_ml(const ml::LabeledDataset& ds, const ml::MlSpec& spec, std::uint64_t seed);
json report_json(const ml::EvalReport& r);
json cv_json(const ml::CvResult& cv, const ml::MlSpec& spec, ml::Task task);

// Writes report.json, predictions.csv and, for classification,
// confusion.svg and roc.svg.
fs::path cmd_ml(const fs::path& dataset, ml::Task task, const ml::MlSpec& spec, const Common& c);

// Writes trace.csv and reports.json.
fs::path cmd_fed(const fed::FedConfig& cfg, const std::vector<fed::SiteShard>& shards, const Common& c);
fs::path cmd_fed(const fs::path& fed_manifest, std::optional<std::uint64_t> seed_override, const Common& c);

// Simulated 10-region, 30-timepoint series: three latent signals mixed into
// the regions plus noise, from SeededRng(seed, "simulate").
TimeSeries simulate_series(std::uint64_t seed, std::size_t regions = 10, std::size_t timepoints = 30);
BrainGraph simulated_network(std::uint64_t seed);  // Pearson, top 50% kept

// Writes heatmap.svg and topology.svg.
fs::path cmd_viz(const BrainGraph& g, const Common& c);

// PipelineConfig:
//   {"manifest": "...", "seed": 0, "out": "...", "jobs": 1,
//    "stages": [{"stage": "augment", ...}, {"stage": "construct", ...},
//               {"stage": "features", "selection": [...]},
//               {"stage": "ml", ...} | {"stage": "fed", ...}]}
// Each stage writes under out/<stage>. Relative paths resolve against the
// config file. --seed/--out/--jobs override the file.
fs::path cmd_pipeline(const fs::path& config, std::optional<std::uint64_t> seed_override,
                      std::optional<fs::path> out_override, std::optional<std::size_t> jobs_override);

}  // namespace cortexkit::cli
