#pragma once

#include <string>

#include "trajstitch/rng.hpp"
#include "trajstitch/tensor.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

// 2-D point mass with clipped additive dynamics and a sparse goal reward.
struct PointMazeSpec {
  RowVector start = RowVector::Zero(2);
  RowVector goal = (RowVector(2) << 3.0, 3.0).finished();
  double goal_radius = 0.2;
  double max_step = 0.15;
  int episode_cap = 100;
  RowVector lower = (RowVector(2) << -1.0, -1.0).finished();
  RowVector upper = (RowVector(2) << 4.0, 4.0).finished();
  // Evaluation episodes start uniformly within this box half-width around start.
  double start_jitter = 0.05;

  void validate() const;
  bool in_bounds(const RowVector& state) const;
  bool at_goal(const RowVector& state) const;
};

struct StepResult {
  RowVector next_state;
  double reward = 0.0;
  bool done = false;
};

// next = clip_bounds(state + clip_norm(action, max_step)); reward 1 and done
// iff next lies within goal_radius of the goal.
StepResult env_step(const PointMazeSpec& spec, const RowVector& state, const RowVector& action);

// Rescales `action` to norm `max_norm` if it is longer.
RowVector clip_norm(const RowVector& action, double max_norm);

inline constexpr const char* kDisjointFamilies = "disjoint-families";

// Family A leaves the start heading east along y ~ 0 and never earns reward.
// Family B starts in a cluster below the goal and walks north into it.
struct DisjointFamiliesConfig {
  double a_speed = 0.1;
  double a_speed_noise = 0.01;
  double a_lateral_noise = 0.01;
  double a_lateral_pull = 0.3;
  int a_min_length = 32;
  int a_max_length = 38;

  RowVector b_start_center = (RowVector(2) << 3.0, 1.15).finished();
  RowVector b_start_half_width = (RowVector(2) << 0.1, 0.05).finished();
  double b_speed = 0.045;
  double b_noise = 0.005;
  int b_max_length = 80;

  double min_family_gap = 1.0;
};

// Family A occupies trajectories [0, n), family B [n, 2n). Throws ConfigError
// for an unknown scenario and if the families come closer than the gap.
Dataset generate_offline_dataset(const PointMazeSpec& spec, const std::string& scenario, int n_per_family, Rng& rng,
                                 const DisjointFamiliesConfig& families = {});

// Smallest distance between a state of trajectories [0, split) and one of
// [split, size), by exhaustive pairwise scan.
double min_cross_family_distance(const Dataset& dataset, int split);

}  // namespace trajstitch
