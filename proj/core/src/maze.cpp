#include "trajstitch/maze.hpp"

#include <cmath>
#include <limits>

#include "trajstitch/errors.hpp"

namespace trajstitch {

void PointMazeSpec::validate() const {
  if (start.size() != 2 || goal.size() != 2 || lower.size() != 2 || upper.size() != 2) {
    throw ConfigError("point maze is two-dimensional");
  }
  if (!(goal_radius > 0.0)) throw ConfigError("goal radius must be positive");
  if (!(max_step > 0.0)) throw ConfigError("max step norm must be positive");
  if (episode_cap < 1) throw ConfigError("episode cap must be >= 1");
  if (start_jitter < 0.0) throw ConfigError("start jitter must be non-negative");
  if (!in_bounds(start) || !in_bounds(goal)) throw ConfigError("start and goal must lie inside the arena");
}

bool PointMazeSpec::in_bounds(const RowVector& s) const {
  return (s.array() >= lower.array()).all() && (s.array() <= upper.array()).all();
}

bool PointMazeSpec::at_goal(const RowVector& s) const { return (s - goal).norm() <= goal_radius; }

RowVector clip_norm(const RowVector& action, double max_norm) {
  const double n = action.norm();
  if (n > max_norm) return action * (max_norm / n);
  return action;
}

StepResult env_step(const PointMazeSpec& spec, const RowVector& state, const RowVector& action) {
  if (state.size() != 2 || action.size() != 2) throw ShapeError("point maze states and actions are 2-D");
  StepResult r;
  r.next_state = (state + clip_norm(action, spec.max_step)).cwiseMax(spec.lower).cwiseMin(spec.upper);
  r.done = spec.at_goal(r.next_state);
  r.reward = r.done ? 1.0 : 0.0;
  return r;
}

namespace {

Trajectory family_a(const PointMazeSpec& spec, const DisjointFamiliesConfig& cfg, Rng& rng) {
  const int len = uniform_int(rng, cfg.a_min_length, cfg.a_max_length);
  Trajectory t;
  t.states.resize(len, 2);
  t.actions.resize(len, 2);
  t.rewards = Vector::Zero(len);
  RowVector s = spec.start;
  for (int i = 0; i < len; ++i) {
    RowVector a(2);
    a << cfg.a_speed + cfg.a_speed_noise * standard_normal(rng),
        -cfg.a_lateral_pull * s(1) + cfg.a_lateral_noise * standard_normal(rng);
    const StepResult step = env_step(spec, s, a);
    if (step.done) throw ConfigError("family A trajectory reached the goal");
    t.states.row(i) = s;
    t.actions.row(i) = a;
    s = step.next_state;
  }
  return t;
}

Trajectory family_b(const PointMazeSpec& spec, const DisjointFamiliesConfig& cfg, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    RowVector s(2);
    for (int k = 0; k < 2; ++k) {
      s(k) = cfg.b_start_center(k) + uniform_real(rng, -cfg.b_start_half_width(k), cfg.b_start_half_width(k));
    }
    Trajectory t;
    t.states.resize(cfg.b_max_length, 2);
    t.actions.resize(cfg.b_max_length, 2);
    t.rewards = Vector::Zero(cfg.b_max_length);
    for (int i = 0; i < cfg.b_max_length; ++i) {
      RowVector a(2);
      a << cfg.b_noise * standard_normal(rng), cfg.b_speed + cfg.b_noise * standard_normal(rng);
      const StepResult step = env_step(spec, s, a);
      t.states.row(i) = s;
      t.actions.row(i) = a;
      t.rewards(i) = step.reward;
      s = step.next_state;
      if (step.done) {
        const int len = i + 1;
        t.states.conservativeResize(len, 2);
        t.actions.conservativeResize(len, 2);
        t.rewards.conservativeResize(len);
        return t;
      }
    }
  }
  throw ConfigError("family B trajectories fail to reach the goal within " + std::to_string(cfg.b_max_length) +
                    " steps");
}

}  // namespace

Dataset generate_offline_dataset(const PointMazeSpec& spec, const std::string& scenario, int n_per_family, Rng& rng,
                                 const DisjointFamiliesConfig& families) {
  if (scenario != kDisjointFamilies) throw ConfigError("unknown scenario '" + scenario + "'");
  if (n_per_family < 1) throw ConfigError("n_per_family must be >= 1");
  spec.validate();
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 2;
  for (int i = 0; i < n_per_family; ++i) ds.trajectories.push_back(family_a(spec, families, rng));
  for (int i = 0; i < n_per_family; ++i) ds.trajectories.push_back(family_b(spec, families, rng));
  const double gap = min_cross_family_distance(ds, n_per_family);
  if (gap < families.min_family_gap) {
    throw ConfigError("families overlap: minimum distance " + std::to_string(gap) + " < gap " +
                      std::to_string(families.min_family_gap));
  }
  ds.validate();
  return ds;
}

double min_cross_family_distance(const Dataset& dataset, int split) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < split; ++i) {
    const auto& a = dataset.trajectories[static_cast<std::size_t>(i)].states;
    for (std::size_t j = static_cast<std::size_t>(split); j < dataset.size(); ++j) {
      const auto& b = dataset.trajectories[j].states;
      for (Eigen::Index p = 0; p < a.rows(); ++p) {
        for (Eigen::Index q = 0; q < b.rows(); ++q) best = std::min(best, (a.row(p) - b.row(q)).norm());
      }
    }
  }
  return best;
}

}  // namespace trajstitch
