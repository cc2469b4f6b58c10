#include <sstream>

#include "json.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/io_util.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {
namespace {

using nlohmann::json;

json rows_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix rows_from_json(const json& j, int line, const char* key) {
  if (!j.is_array()) throw ParseError(line, std::string("'") + key + "' must be an array of arrays");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t width = j.front().is_array() ? j.front().size() : 0;
  if (width == 0) throw ParseError(line, std::string("'") + key + "' rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != width) {
      throw ParseError(line, std::string("'") + key + "' row " + std::to_string(r) + " has inconsistent width");
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (!row[c].is_number()) throw ParseError(line, std::string("'") + key + "' holds a non-number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

Trajectory trajectory_from_json(const json& j, int line) {
  if (!j.is_object()) throw ParseError(line, "record is not a JSON object");
  for (const char* key : {"states", "actions", "rewards"}) {
    if (!j.contains(key)) throw ParseError(line, std::string("missing key '") + key + "'");
  }
  Trajectory t;
  t.states = rows_from_json(j["states"], line, "states");
  t.actions = rows_from_json(j["actions"], line, "actions");
  const auto& rewards = j["rewards"];
  if (!rewards.is_array()) throw ParseError(line, "'rewards' must be an array");
  t.rewards.resize(static_cast<Eigen::Index>(rewards.size()));
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!rewards[i].is_number()) throw ParseError(line, "'rewards' holds a non-number");
    t.rewards(static_cast<Eigen::Index>(i)) = rewards[i].get<double>();
  }
  if (j.contains("source")) {
    const auto source = j["source"].get<std::string>();
    if (source == "original") {
      t.source = SourceTag::kOriginal;
    } else if (source == "augmented") {
      t.source = SourceTag::kAugmented;
    } else {
      throw ParseError(line, "unknown source tag '" + source + "'");
    }
  }
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    t.provenance = StitchProvenance{p.at("low_index").get<int>(), p.at("prefix_length").get<int>(),
                                    p.at("high_index").get<int>(), p.at("suffix_start").get<int>(),
                                    p.at("delta").get<int>()};
  }
  try {
    t.validate();
  } catch (const SchemaError& e) {
    throw ParseError(line, e.what());
  }
  return t;
}

}  // namespace

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& t : dataset.trajectories) {
    json j;
    j["states"] = rows_to_json(t.states);
    j["actions"] = rows_to_json(t.actions);
    j["rewards"] = std::vector<double>(t.rewards.data(), t.rewards.data() + t.rewards.size());
    j["source"] = to_string(t.source);
    if (t.provenance) {
      const auto& p = *t.provenance;
      j["provenance"] = {{"low_index", p.low_index},     {"prefix_length", p.prefix_length},
                         {"high_index", p.high_index},   {"suffix_start", p.suffix_start},
                         {"delta", p.delta}};
    }
    // nlohmann serializes doubles with round-trip (17 significant digit) precision.
    out += j.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  Dataset ds;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    Trajectory t;
    try {
      t = trajectory_from_json(j, line_no);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (ds.trajectories.empty()) {
      ds.state_dim = t.state_dim();
      ds.action_dim = t.action_dim();
    } else if (t.state_dim() != ds.state_dim || t.action_dim() != ds.action_dim) {
      throw SchemaError("line " + std::to_string(line_no) + ": dimension mismatch across trajectories");
    }
    ds.trajectories.push_back(std::move(t));
  }
  if (ds.trajectories.empty()) throw SchemaError("empty dataset");
  return ds;
}

std::filesystem::path stats_sidecar_path(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p.replace_extension(".stats.json");
  return p;
}

Dataset load_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("dataset file not found: " + path.string());
  Dataset ds = dataset_from_jsonl(read_text_file(path));
  const auto sidecar = stats_sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    ds.norm_stats = norm_stats_from_json(read_text_file(sidecar));
    if (ds.norm_stats->dim() != ds.state_dim) throw SchemaError("stats sidecar dimension mismatch");
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("directory does not exist: " + parent.string());
  }
  write_text_file_atomic(path, dataset_to_jsonl(dataset));
  if (dataset.norm_stats) write_text_file_atomic(stats_sidecar_path(path), norm_stats_to_json(*dataset.norm_stats));
}

}  // namespace trajstitch
