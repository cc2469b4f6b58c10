#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajstitch/normalizer.hpp"
#include "trajstitch/tensor.hpp"

namespace trajstitch {

enum class SourceTag { kOriginal, kAugmented };

std::string to_string(SourceTag tag);

// Where an augmented trajectory came from. Indices are 0-based into the
// source dataset; lengths count tuples.
struct StitchProvenance {
  int low_index = 0;
  int prefix_length = 0;
  int high_index = 0;
  int suffix_start = 0;  // 0-based index of s'_1 in the high trajectory
  int delta = 0;

  bool operator==(const StitchProvenance&) const = default;
};

struct Trajectory {
  Matrix states;   // T x d_s
  Matrix actions;  // T x d_a
  Vector rewards;  // T
  SourceTag source = SourceTag::kOriginal;
  std::optional<StitchProvenance> provenance;

  int length() const { return static_cast<int>(states.rows()); }
  int state_dim() const { return static_cast<int>(states.cols()); }
  int action_dim() const { return static_cast<int>(actions.cols()); }

  // Throws SchemaError unless |states| = |actions| = |rewards| = T >= 2 and
  // every entry is finite.
  void validate() const;
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  int state_dim = 0;
  int action_dim = 0;
  std::optional<NormStats> norm_stats;

  bool empty() const { return trajectories.empty(); }
  std::size_t size() const { return trajectories.size(); }
  std::size_t transition_count() const;

  void validate() const;
};

// JSON-lines, one trajectory per line:
//   {"states": [[...],...], "actions": [[...],...], "rewards": [...],
//    "source": "original"|"augmented", "provenance": {...}}
// The sidecar <stem>.stats.json holds {"mean": [...], "std": [...]}.
std::string dataset_to_jsonl(const Dataset& dataset);
Dataset dataset_from_jsonl(const std::string& text);

// Also reads/writes the stats sidecar when present.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

std::filesystem::path stats_sidecar_path(const std::filesystem::path& dataset_path);

// Copy whose states are mapped into normalized space.
Dataset normalized_copy(const Dataset& dataset, const NormStats& stats);

bool operator==(const Trajectory& a, const Trajectory& b);

}  // namespace trajstitch
