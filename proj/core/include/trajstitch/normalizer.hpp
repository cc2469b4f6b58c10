#pragma once

#include <string>

#include "trajstitch/tensor.hpp"

namespace trajstitch {

struct Dataset;

inline constexpr double kStdFloor = 1e-6;

// Per-dimension z-score statistics.
struct NormStats {
  RowVector mean;
  RowVector std;

  int dim() const { return static_cast<int>(mean.size()); }

  RowVector normalize(const RowVector& v) const;
  RowVector denormalize(const RowVector& v) const;
  // Row-wise over a stack of states.
  Matrix normalize(const Matrix& m) const;
  Matrix denormalize(const Matrix& m) const;

  bool operator==(const NormStats&) const = default;
};

// Population mean/std over every state of every trajectory. Dimensions whose
// std falls below the floor are clamped to it with a warning.
NormStats fit_normalizer(const Dataset& dataset, double std_floor = kStdFloor);

std::string norm_stats_to_json(const NormStats& stats);
NormStats norm_stats_from_json(const std::string& text);

}  // namespace trajstitch
