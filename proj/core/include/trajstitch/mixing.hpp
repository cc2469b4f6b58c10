#pragma once

#include <vector>

#include "trajstitch/rng.hpp"
#include "trajstitch/tensor.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

// Original:augmented proportion r within each training batch.
struct MixConfig {
  int original_parts = 4;
  int augmented_parts = 1;
  int batch_size = 256;

  void validate() const;
  // round(batch * o / (o + a)), halves away from zero.
  int original_count() const;
  int augmented_count() const { return batch_size - original_count(); }
};

// Flat (state, action) rows.
struct StateActionPool {
  Matrix states;
  Matrix actions;

  int size() const { return static_cast<int>(states.rows()); }
  bool empty() const { return states.rows() == 0; }
};

// Every tuple of the selected trajectories; the one-argument form takes all.
StateActionPool make_pool(const Dataset& dataset, const std::vector<int>& indices);
StateActionPool make_pool(const Dataset& dataset);

struct TransitionBatch {
  Matrix states;
  Matrix actions;
  std::vector<bool> augmented;
  int original_count = 0;
  int augmented_count = 0;
};

// Draws rows with replacement from each pool in the configured proportion and
// shuffles them. Throws ConfigError if a part is positive but its pool empty.
TransitionBatch mixed_batch_sampler(const StateActionPool& original, const StateActionPool& augmented,
                                    const MixConfig& mix, Rng& rng);

}  // namespace trajstitch
