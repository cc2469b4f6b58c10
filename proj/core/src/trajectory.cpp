#include "trajstitch/trajectory.hpp"

#include <cmath>

#include "trajstitch/errors.hpp"

namespace trajstitch {

std::string to_string(SourceTag tag) { return tag == SourceTag::kAugmented ? "augmented" : "original"; }

void Trajectory::validate() const {
  const auto t = states.rows();
  if (actions.rows() != t || rewards.size() != t) {
    throw SchemaError("trajectory has " + std::to_string(t) + " states, " + std::to_string(actions.rows()) +
                      " actions, " + std::to_string(rewards.size()) + " rewards");
  }
  if (t < 2) throw SchemaError("trajectory must have at least 2 steps");
  if (states.cols() == 0 || actions.cols() == 0) throw SchemaError("trajectory has zero-width states or actions");
  if (!states.allFinite() || !actions.allFinite() || !rewards.allFinite()) {
    throw SchemaError("trajectory contains non-finite values");
  }
}

std::size_t Dataset::transition_count() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += static_cast<std::size_t>(t.length() - 1);
  return n;
}

void Dataset::validate() const {
  if (trajectories.empty()) throw SchemaError("empty dataset");
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    t.validate();
    if (t.state_dim() != state_dim || t.action_dim() != action_dim) {
      throw SchemaError("trajectory " + std::to_string(i) + " has dimensions (" + std::to_string(t.state_dim()) +
                        ", " + std::to_string(t.action_dim()) + "), dataset expects (" +
                        std::to_string(state_dim) + ", " + std::to_string(action_dim) + ")");
    }
  }
  if (norm_stats && norm_stats->dim() != state_dim) throw SchemaError("norm stats dimension mismatch");
}

Dataset normalized_copy(const Dataset& dataset, const NormStats& stats) {
  Dataset out = dataset;
  for (auto& t : out.trajectories) t.states = stats.normalize(t.states);
  return out;
}

bool operator==(const Trajectory& a, const Trajectory& b) {
  return a.states.rows() == b.states.rows() && a.states.cols() == b.states.cols() &&
         a.actions.rows() == b.actions.rows() && a.actions.cols() == b.actions.cols() &&
         a.rewards.size() == b.rewards.size() && a.states == b.states && a.actions == b.actions &&
         a.rewards == b.rewards && a.source == b.source && a.provenance == b.provenance;
}

}  // namespace trajstitch
