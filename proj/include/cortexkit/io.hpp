#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cortexkit/fed.hpp"
#include "cortexkit/features.hpp"
#include "cortexkit/graph.hpp"
#include "cortexkit/ml.hpp"
#include "cortexkit/timeseries.hpp"

namespace cortexkit::io {

namespace fs = std::filesystem;

// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const fs::path& path, const std::string& contents);
std::string read_file(const fs::path& path);

struct CsvMatrix {
  std::vector<std::string> header;  // empty when the file has none
  Matrix values;
};

// Comma-separated reals. The first row is a header when none of its cells
// parse as a number. Ragged rows and non-numeric or non-finite cells throw
// ParseError with the 1-based location.
CsvMatrix parse_csv_matrix(const std::string& text, const std::string& source);
std::string format_csv_matrix(const Matrix& m, const std::vector<std::string>& header = {});

struct LoadedSeries {
  TimeSeries series;
  std::vector<std::string> header;
};

// T rows x N columns. Throws ParseError when T < 2.
LoadedSeries load_timeseries(const fs::path& path);
TimeSeries load_timeseries_csv(const fs::path& path);
void save_timeseries_csv(const TimeSeries& ts, const fs::path& path, const std::vector<std::string>& header = {});

struct SubjectRecord {
  std::string subject_id;
  fs::path series_path;  // resolved against the manifest's directory
  std::optional<double> label;
  std::optional<std::string> site_id;
};

// JSON array of {"subject_id", "series_path", optional "label", optional
// "site_id"}. Throws ManifestError on duplicate ids, missing files or
// malformed records.
std::vector<SubjectRecord> load_manifest(const fs::path& path);
void save_manifest(const std::vector<SubjectRecord>& records, const fs::path& path);

// Headerless N x N adjacency. A graph whose entries are all 0/1 loads as
// unweighted. Asymmetry or a nonzero diagonal throws ValidationError.
void save_graph_csv(const BrainGraph& g, const fs::path& path);
BrainGraph load_graph_csv(const fs::path& path);

// Columns: target, site, f0..f{d-1}.
void save_dataset_csv(const ml::LabeledDataset& ds, const fs::path& path);
ml::LabeledDataset load_dataset_csv(const fs::path& path, ml::Task task);

// Federation experiment manifest:
//   {"shards": [{"site_id": "...", "path": "dataset.csv"}, ...],
//    "strategy": "fedavg", "rounds": 20, "mu": 1.0, "moon_weight": 1.0,
//    "moon_temp": 0.5, "seed": 0, "hidden": 16, "folds": 5,
//    "local_epochs": 2, "lr": 0.1, "batch": 16, ...}
struct FedExperiment {
  fed::FedConfig config;
  std::vector<fed::SiteShard> shards;
};
FedExperiment load_fed_manifest(const fs::path& path);

// Node table: one row per node with a `node` column then the selected
// measures. Graph table: one row per measure (name,value).
std::string format_node_features(const features::NodeFeatureTable& t);
std::string format_graph_features(const features::GraphFeatureSet& s);

std::string format_trace_csv(const fed::FedTrace& trace);

}  // namespace cortexkit::io
