#pragma once

#include <vector>

#include "trajstitch/rng.hpp"
#include "trajstitch/tensor.hpp"

namespace trajstitch {

// H x d_s window of normalized states; observed[i] marks the positions whose
// values condition generation. Values at masked positions are ignored.
struct MaskedWindow {
  Matrix values;
  std::vector<bool> observed;

  int horizon() const { return static_cast<int>(values.rows()); }
  int state_dim() const { return static_cast<int>(values.cols()); }
  int observed_count() const;

  // Throws SchemaError on size mismatch, no observed position, or non-finite
  // observed values.
  void validate() const;
};

// Observed flags for a window of length H with two disjoint masked intervals:
// [first_begin, first_begin + first_length) and the tail [H - second_length, H).
// Indices are 0-based. Requires first_begin >= 1 and at least one observed
// position between the intervals.
std::vector<bool> training_mask_from_intervals(int horizon, int first_begin, int first_length,
                                               int second_length);

// Random training mask: position 0 observed, position H-1 masked, masked set
// is exactly two disjoint intervals with at least one observed position
// between them. Tail length L2 ~ U[1, min(H/2, H-3)], first length
// L1 ~ U[1, min(H/2, H-L2-2)], first start ~ U[1, H-L2-L1-1]. Requires H >= 4.
std::vector<bool> make_training_mask(int horizon, Rng& rng);

}  // namespace trajstitch
