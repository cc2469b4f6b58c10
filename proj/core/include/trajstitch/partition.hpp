#pragma once

#include <vector>

#include "trajstitch/rng.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

struct ReturnPools {
  std::vector<int> low;   // dataset indices, ascending
  std::vector<int> high;
};

// Nearest-rank pools: the low pool is every trajectory whose return is at most
// the ceil(low_quantile * n)-th smallest return; the high pool is every
// trajectory whose return is at least the ceil((1 - high_quantile) * n)-th
// largest return.
ReturnPools partition_by_return(const Dataset& dataset, double gamma, double low_quantile,
                                double high_quantile);

enum class CutMode { kPrefix, kSuffix };

struct CutSegment {
  Trajectory segment;
  RowVector cut_state;
  int cut_index = 0;  // 0-based index of the cut state in the source trajectory
};

// Valid cut indices c (0-based) satisfy min_keep - 1 <= c <= T - min_keep, so
// both the prefix [0, c] and the suffix [c, T) keep at least min_keep tuples.
// Requires T >= 2 * min_keep - 1.
CutSegment cut_segment(const Trajectory& trajectory, int cut_index, int min_keep, CutMode mode);
CutSegment sample_cut_segment(const Trajectory& trajectory, Rng& rng, int min_keep, CutMode mode);

}  // namespace trajstitch
