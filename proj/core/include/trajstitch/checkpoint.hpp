#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "trajstitch/mlp.hpp"

namespace trajstitch::nn {

inline constexpr int kCheckpointVersion = 1;

// JSON checkpoint: format version, a kind tag, layer widths, activation tag,
// parameters (round-trip precision) and free-form numeric metadata.
struct Checkpoint {
  std::string kind;
  Mlp model;
  std::map<std::string, double> metadata;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace trajstitch::nn
