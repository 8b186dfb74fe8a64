#include "cortexkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cortexkit/errors.hpp"

namespace cortexkit::io {

using json = nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValueError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw ValueError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  if (line.empty()) cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_finite(const std::string& cell, const std::string& source, std::size_t row, std::size_t col) {
  const auto v = parse_number(cell);
  if (!v) throw ParseError(source, row, col, "not a number: '" + trim(cell) + "'");
  if (!std::isfinite(*v)) throw ParseError(source, row, col, "non-finite value '" + trim(cell) + "'");
  return *v;
}

json parse_json(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ParseError&) {
    throw ManifestError("cannot open " + path.string());
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path raw(p);
  return raw.is_absolute() ? raw : (base_dir / raw).lexically_normal();
}

std::string relative_to(const fs::path& target, const fs::path& dir) {
  const fs::path rel = fs::absolute(target).lexically_normal().lexically_relative(fs::absolute(dir).lexically_normal());
  if (rel.empty()) return fs::absolute(target).string();
  return rel.generic_string();
}

}  // namespace

CsvMatrix parse_csv_matrix(const std::string& text, const std::string& source) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(source, 1, 1, "empty file");
  CsvMatrix out;
  std::size_t first = 0;
  {
    const auto cells = split_cells(lines[0]);
    bool any_numeric = false;
    for (const auto& c : cells) any_numeric = any_numeric || parse_number(c).has_value();
    if (!any_numeric) {
      for (const auto& c : cells) out.header.push_back(trim(c));
      first = 1;
    }
  }
  std::size_t width = out.header.size();
  std::vector<double> data;
  std::size_t rows = 0;
  for (std::size_t li = first; li < lines.size(); ++li) {
    const auto cells = split_cells(lines[li]);
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw ParseError(source, li + 1, std::min(cells.size(), width) + 1,
                       "expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) data.push_back(parse_finite(cells[c], source, li + 1, c + 1));
    ++rows;
  }
  out.values = Matrix(rows, width, std::move(data));
  return out;
}

std::string format_csv_matrix(const Matrix& m, const std::vector<std::string>& header) {
  std::string s;
  for (std::size_t c = 0; c < header.size(); ++c) s += (c ? "," : "") + header[c];
  if (!header.empty()) s += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) s += ',';
      s += format_real(m(r, c));
    }
    s += '\n';
  }
  return s;
}

LoadedSeries load_timeseries(const fs::path& path) {
  auto csv = parse_csv_matrix(read_file(path), path.string());
  const std::size_t first_row = csv.header.empty() ? 1 : 2;
  if (csv.values.rows() < 2) {
    throw ParseError(path.string(), first_row + csv.values.rows(), 1,
                     "need at least 2 timepoints, found " + std::to_string(csv.values.rows()));
  }
  return {TimeSeries(std::move(csv.values)), std::move(csv.header)};
}

TimeSeries load_timeseries_csv(const fs::path& path) { return load_timeseries(path).series; }

void save_timeseries_csv(const TimeSeries& ts, const fs::path& path, const std::vector<std::string>& header) {
  if (!header.empty() && header.size() != ts.regions()) throw DimensionError("header width differs from region count");
  write_file_atomic(path, format_csv_matrix(ts.values(), header));
}

std::vector<SubjectRecord> load_manifest(const fs::path& path) {
  const json j = parse_json(path);
  if (!j.is_array()) throw ManifestError(path.string() + ": expected a JSON array of subject records");
  const fs::path dir = path.parent_path();
  std::vector<SubjectRecord> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& rec = j[i];
    const std::string where = path.string() + " record " + std::to_string(i);
    if (!rec.is_object()) throw ManifestError(where + ": not an object");
    if (!rec.contains("subject_id") || !rec["subject_id"].is_string()) throw ManifestError(where + ": missing subject_id");
    if (!rec.contains("series_path") || !rec["series_path"].is_string()) throw ManifestError(where + ": missing series_path");
    SubjectRecord r;
    r.subject_id = rec["subject_id"].get<std::string>();
    if (!seen.insert(r.subject_id).second) throw ManifestError("duplicate subject_id '" + r.subject_id + "'");
    r.series_path = resolve(dir, rec["series_path"].get<std::string>());
    if (!fs::is_regular_file(r.series_path)) {
      throw ManifestError("subject '" + r.subject_id + "': series file " + r.series_path.string() + " not found");
    }
    if (rec.contains("label") && !rec["label"].is_null()) {
      if (!rec["label"].is_number()) throw ManifestError(where + ": label must be a number");
      r.label = rec["label"].get<double>();
    }
    if (rec.contains("site_id") && !rec["site_id"].is_null()) {
      if (!rec["site_id"].is_string()) throw ManifestError(where + ": site_id must be a string");
      r.site_id = rec["site_id"].get<std::string>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void save_manifest(const std::vector<SubjectRecord>& records, const fs::path& path) {
  json j = json::array();
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  for (const auto& r : records) {
    json rec = {{"subject_id", r.subject_id}, {"series_path", relative_to(r.series_path, dir)}};
    if (r.label) rec["label"] = *r.label;
    if (r.site_id) rec["site_id"] = *r.site_id;
    j.push_back(std::move(rec));
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

void save_graph_csv(const BrainGraph& g, const fs::path& path) {
  write_file_atomic(path, format_csv_matrix(g.adjacency()));
}

BrainGraph load_graph_csv(const fs::path& path) {
  auto csv = parse_csv_matrix(read_file(path), path.string());
  if (!csv.header.empty()) throw ParseError(path.string(), 1, 1, "graph files have no header row");
  if (!csv.values.is_square()) {
    throw ValidationError(path.string() + ": adjacency is " + std::to_string(csv.values.rows()) + "x" +
                          std::to_string(csv.values.cols()));
  }
  bool weighted = false;
  for (double v : csv.values.data()) weighted = weighted || (v != 0.0 && v != 1.0);
  return BrainGraph(std::move(csv.values), weighted);
}

void save_dataset_csv(const ml::LabeledDataset& ds, const fs::path& path) {
  std::string s = "target,site";
  for (std::size_t c = 0; c < ds.features.cols(); ++c) s += ",f" + std::to_string(c);
  s += '\n';
  for (std::size_t r = 0; r < ds.size(); ++r) {
    s += format_real(ds.targets[r]);
    s += ',';
    if (!ds.site_ids.empty()) s += ds.site_ids[r];
    for (std::size_t c = 0; c < ds.features.cols(); ++c) s += "," + format_real(ds.features(r, c));
    s += '\n';
  }
  write_file_atomic(path, s);
}

ml::LabeledDataset load_dataset_csv(const fs::path& path, ml::Task task) {
  const std::string source = path.string();
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw ParseError(source, 1, 1, "empty file");
  const auto header = split_cells(lines[0]);
  if (header.size() < 3 || trim(header[0]) != "target" || trim(header[1]) != "site") {
    throw ParseError(source, 1, 1, "expected header 'target,site,f0,...'");
  }
  const std::size_t width = header.size() - 2;
  ml::LabeledDataset ds;
  ds.task = task;
  std::vector<double> data;
  bool any_site = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = split_cells(lines[li]);
    if (cells.size() != header.size()) {
      throw ParseError(source, li + 1, std::min(cells.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()));
    }
    ds.targets.push_back(parse_finite(cells[0], source, li + 1, 1));
    ds.site_ids.push_back(trim(cells[1]));
    any_site = any_site || !ds.site_ids.back().empty();
    for (std::size_t c = 2; c < cells.size(); ++c) data.push_back(parse_finite(cells[c], source, li + 1, c + 1));
  }
  if (ds.targets.empty()) throw ParseError(source, 2, 1, "dataset has no rows");
  if (!any_site) ds.site_ids.clear();
  ds.features = Matrix(ds.targets.size(), width, std::move(data));
  try {
    ml::validate(ds);
  } catch (const Error& e) {
    throw ParseError(source, 0, 0, e.what());
  }
  return ds;
}

FedExperiment load_fed_manifest(const fs::path& path) {
  const json j = parse_json(path);
  if (!j.is_object()) throw ManifestError(path.string() + ": expected a JSON object");
  FedExperiment ex;
  auto& c = ex.config;
  try {
    c.strategy = fed::parse_strategy(j.value("strategy", std::string("fedavg")));
    c.rounds = j.value("rounds", c.rounds);
    c.mu = j.value("mu", c.mu);
    c.moon_weight = j.value("moon_weight", c.moon_weight);
    c.moon_temp = j.value("moon_temp", c.moon_temp);
    c.seed = j.value("seed", c.seed);
    c.hidden = j.value("hidden", c.hidden);
    c.folds = j.value("folds", c.folds);
    c.pfedme_inner_iters = j.value("pfedme_inner_iters", c.pfedme_inner_iters);
    c.pfedme_inner_lr = j.value("pfedme_inner_lr", c.pfedme_inner_lr);
    c.pfedme_beta = j.value("pfedme_beta", c.pfedme_beta);
    const fed::SiteShard defaults;
    const std::size_t local_epochs = j.value("local_epochs", defaults.local_epochs);
    const double lr = j.value("lr", defaults.lr);
    const std::size_t batch = j.value("batch", defaults.batch);
    if (!j.contains("shards") || !j["shards"].is_array()) throw ManifestError(path.string() + ": missing shards array");
    for (const auto& s : j["shards"]) {
      fed::SiteShard shard;
      shard.site_id = s.at("site_id").get<std::string>();
      const fs::path data = resolve(path.parent_path(), s.at("path").get<std::string>());
      if (!fs::is_regular_file(data)) throw ManifestError("site '" + shard.site_id + "': " + data.string() + " not found");
      shard.dataset = load_dataset_csv(data, ml::Task::classification);
      shard.local_epochs = s.value("local_epochs", local_epochs);
      shard.lr = s.value("lr", lr);
      shard.batch = s.value("batch", batch);
      ex.shards.push_back(std::move(shard));
    }
  } catch (const json::exception& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
  fed::validate(c);
  return ex;
}

std::string format_node_features(const features::NodeFeatureTable& t) {
  std::string s = "node";
  for (const auto& n : t.names) s += "," + n;
  s += '\n';
  const std::size_t n = t.columns.empty() ? 0 : t.columns.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    s += std::to_string(i);
    for (const auto& col : t.columns) s += "," + format_real(col[i]);
    s += '\n';
  }
  return s;
}

std::string format_graph_features(const features::GraphFeatureSet& set) {
  std::string s = "feature,value\n";
  for (std::size_t i = 0; i < set.names.size(); ++i) s += set.names[i] + "," + format_real(set.values[i]) + "\n";
  return s;
}

std::string format_trace_csv(const fed::FedTrace& trace) {
  std::string s = "round,site,loss,bytes,cumulative_bytes\n";
  for (const auto& r : trace.rows) {
    s += std::to_string(r.round) + "," + r.site_id + "," + format_real(r.loss) + "," + std::to_string(r.bytes) + "," +
         std::to_string(r.cumulative_bytes) + "\n";
  }
  return s;
}

}  // namespace cortexkit::io
