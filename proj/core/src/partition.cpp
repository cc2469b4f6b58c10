#include "trajstitch/partition.hpp"

#include <algorithm>
#include <cmath>

#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/returns.hpp"

namespace trajstitch {
namespace {

// ceil() that tolerates representation error such as (1 - 0.7) * 10.
int rank_count(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  int k = static_cast<int>(std::ceil(x - 1e-9));
  return std::clamp(k, 1, static_cast<int>(n));
}

}  // namespace

ReturnPools partition_by_return(const Dataset& dataset, double gamma, double low_quantile,
                                double high_quantile) {
  if (!(low_quantile > 0.0 && low_quantile <= high_quantile && high_quantile < 1.0)) {
    throw ConfigError("partition_by_return requires 0 < low_quantile <= high_quantile < 1");
  }
  if (dataset.empty()) throw ConfigError("partition_by_return: empty dataset");
  const std::size_t n = dataset.size();
  std::vector<double> returns(n);
  for (std::size_t i = 0; i < n; ++i) returns[i] = compute_returns(dataset.trajectories[i], gamma).total;

  std::vector<double> sorted = returns;
  std::sort(sorted.begin(), sorted.end());
  const double low_cut = sorted[static_cast<std::size_t>(rank_count(low_quantile, n) - 1)];
  const double high_cut = sorted[n - static_cast<std::size_t>(rank_count(1.0 - high_quantile, n))];

  ReturnPools pools;
  for (std::size_t i = 0; i < n; ++i) {
    if (returns[i] <= low_cut) pools.low.push_back(static_cast<int>(i));
    if (returns[i] >= high_cut) pools.high.push_back(static_cast<int>(i));
  }
  if (pools.low.empty() || pools.high.empty()) throw ConfigError("partition_by_return produced an empty pool");
  if (sorted.front() == sorted.back() && n > 1) {
    warn("all trajectory returns are equal; low and high pools both hold the whole dataset");
  }
  return pools;
}

CutSegment cut_segment(const Trajectory& trajectory, int cut_index, int min_keep, CutMode mode) {
  const int t = trajectory.length();
  if (min_keep < 1) throw ConfigError("min_keep must be at least 1");
  if (t < 2 * min_keep - 1) {
    throw ConfigError("trajectory of length " + std::to_string(t) + " is too short to cut with min_keep " +
                      std::to_string(min_keep));
  }
  if (cut_index < min_keep - 1 || cut_index > t - min_keep) {
    throw ConfigError("cut index " + std::to_string(cut_index) + " outside [" + std::to_string(min_keep - 1) +
                      ", " + std::to_string(t - min_keep) + "]");
  }
  CutSegment out;
  out.cut_index = cut_index;
  out.cut_state = trajectory.states.row(cut_index);
  const int begin = mode == CutMode::kPrefix ? 0 : cut_index;
  const int len = mode == CutMode::kPrefix ? cut_index + 1 : t - cut_index;
  out.segment.states = trajectory.states.middleRows(begin, len);
  out.segment.actions = trajectory.actions.middleRows(begin, len);
  out.segment.rewards = trajectory.rewards.segment(begin, len);
  out.segment.source = trajectory.source;
  return out;
}

CutSegment sample_cut_segment(const Trajectory& trajectory, Rng& rng, int min_keep, CutMode mode) {
  const int t = trajectory.length();
  if (min_keep < 1 || t < 2 * min_keep - 1) {
    throw ConfigError("trajectory of length " + std::to_string(t) + " is too short to cut with min_keep " +
                      std::to_string(min_keep));
  }
  return cut_segment(trajectory, uniform_int(rng, min_keep - 1, t - min_keep), min_keep, mode);
}

}  // namespace trajstitch
