#pragma once

#include <functional>
#include <vector>

#include "trajstitch/maze.hpp"
#include "trajstitch/mixing.hpp"
#include "trajstitch/mlp.hpp"
#include "trajstitch/normalizer.hpp"
#include "trajstitch/optimizer.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

struct PolicyModel {
  nn::Mlp network;  // normalized state -> action
  NormStats norm;
  double max_step = 0.15;
  double percentile = 0.2;

  // Deterministic action, clipped to max_step.
  RowVector act(const RowVector& state) const;
};

struct BcConfig {
  std::vector<int> hidden{64, 64};
  int steps = 3000;
  nn::AdamConfig adam;
  double percentile = 0.2;
  // Returns within this fraction of the return range below the cut count as
  // ties with it; learned rewards make stitched returns slightly noisy.
  double return_tolerance = 0.05;
  double rank_gamma = 1.0;
};

// Trajectory indices of D* = original + augmented whose return is in the top
// `percentile` fraction.
struct TopPercentile {
  std::vector<int> original;
  std::vector<int> augmented;
  double threshold = 0.0;
};

TopPercentile select_top_percentile(const Dataset& original, const Dataset& augmented, double percentile,
                                    double rank_gamma, double tolerance);

// Behavior cloning (MSE on actions) over the top-percentile transitions,
// batches drawn through mixed_batch_sampler.
PolicyModel train_percentile_bc(const Dataset& original, const Dataset& augmented, const MixConfig& mix,
                                const BcConfig& config, const NormStats& norm, double max_step, Rng& rng);

using PolicyFn = std::function<RowVector(const RowVector&)>;

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
  int episodes = 0;
};

// Rolls out from the (jittered) start until the goal or the episode cap.
EvalResult evaluate_policy(const PointMazeSpec& spec, const PolicyFn& policy, int episodes, double gamma, Rng& rng);

// Steps straight at the goal at full speed.
PolicyFn oracle_policy(const PointMazeSpec& spec);
PolicyFn zero_policy(int action_dim);

}  // namespace trajstitch
