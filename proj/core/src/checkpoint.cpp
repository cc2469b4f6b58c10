#include "trajstitch/checkpoint.hpp"

#include "json.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/io_util.hpp"

namespace trajstitch::nn {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) throw SchemaError("checkpoint weight rows mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw SchemaError("checkpoint weight cols mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  const Mlp& model = checkpoint.model;
  json j;
  j["format_version"] = kCheckpointVersion;
  j["kind"] = checkpoint.kind;
  j["widths"] = model.widths();
  j["activation"] = to_string(model.hidden_activation());
  json layers = json::array();
  for (const auto& l : model.layers()) {
    json layer;
    layer["weight"] = matrix_to_json(l.weight);
    layer["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  j["metadata"] = checkpoint.metadata;
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kCheckpointVersion) {
      throw SchemaError("unsupported checkpoint version");
    }
    Checkpoint out;
    out.kind = j.at("kind").get<std::string>();
    auto widths = j.at("widths").get<std::vector<int>>();
    out.model = Mlp::zeros(widths, activation_from_string(j.at("activation").get<std::string>()));
    const auto& layers = j.at("layers");
    if (layers.size() != out.model.layers().size()) throw SchemaError("checkpoint layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto& dst = out.model.layers()[i];
      dst.weight = matrix_from_json(layers[i].at("weight"), widths[i], widths[i + 1]);
      auto bias = layers[i].at("bias").get<std::vector<double>>();
      if (static_cast<int>(bias.size()) != widths[i + 1]) throw SchemaError("checkpoint bias size mismatch");
      dst.bias = Eigen::Map<RowVector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    }
    if (j.contains("metadata")) out.metadata = j.at("metadata").get<std::map<std::string, double>>();
    return out;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_text_file_atomic(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_text_file(path));
}

}  // namespace trajstitch::nn
