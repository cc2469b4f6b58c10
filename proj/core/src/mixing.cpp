#include "trajstitch/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trajstitch/errors.hpp"

namespace trajstitch {

void MixConfig::validate() const {
  if (original_parts < 0 || augmented_parts < 0 || original_parts + augmented_parts == 0) {
    throw ConfigError("mix ratio parts must be non-negative and not both zero");
  }
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

int MixConfig::original_count() const {
  validate();
  return static_cast<int>(std::lround(static_cast<double>(batch_size) * original_parts /
                                      static_cast<double>(original_parts + augmented_parts)));
}

StateActionPool make_pool(const Dataset& dataset, const std::vector<int>& indices) {
  Eigen::Index rows = 0;
  for (int i : indices) rows += dataset.trajectories.at(static_cast<std::size_t>(i)).length();
  StateActionPool pool;
  pool.states.resize(rows, dataset.state_dim);
  pool.actions.resize(rows, dataset.action_dim);
  Eigen::Index at = 0;
  for (int i : indices) {
    const auto& t = dataset.trajectories[static_cast<std::size_t>(i)];
    pool.states.middleRows(at, t.length()) = t.states;
    pool.actions.middleRows(at, t.length()) = t.actions;
    at += t.length();
  }
  return pool;
}

StateActionPool make_pool(const Dataset& dataset) {
  std::vector<int> all(dataset.size());
  std::iota(all.begin(), all.end(), 0);
  return make_pool(dataset, all);
}

TransitionBatch mixed_batch_sampler(const StateActionPool& original, const StateActionPool& augmented,
                                    const MixConfig& mix, Rng& rng) {
  mix.validate();
  const int n_orig = mix.original_count();
  const int n_aug = mix.batch_size - n_orig;
  if (n_orig > 0 && original.empty()) throw ConfigError("mixed batch needs original data but the pool is empty");
  if (n_aug > 0 && augmented.empty()) throw ConfigError("mixed batch needs augmented data but the pool is empty");
  const Eigen::Index width_s = n_orig > 0 ? original.states.cols() : augmented.states.cols();
  const Eigen::Index width_a = n_orig > 0 ? original.actions.cols() : augmented.actions.cols();

  std::vector<int> order(static_cast<std::size_t>(mix.batch_size));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  TransitionBatch batch;
  batch.states.resize(mix.batch_size, width_s);
  batch.actions.resize(mix.batch_size, width_a);
  batch.augmented.assign(static_cast<std::size_t>(mix.batch_size), false);
  batch.original_count = n_orig;
  batch.augmented_count = n_aug;
  for (int i = 0; i < mix.batch_size; ++i) {
    const bool from_aug = i >= n_orig;
    const auto& pool = from_aug ? augmented : original;
    const int src = uniform_int(rng, 0, pool.size() - 1);
    const int dst = order[static_cast<std::size_t>(i)];
    batch.states.row(dst) = pool.states.row(src);
    batch.actions.row(dst) = pool.actions.row(src);
    batch.augmented[static_cast<std::size_t>(dst)] = from_aug;
  }
  return batch;
}

}  // namespace trajstitch
