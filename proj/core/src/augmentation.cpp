#include "trajstitch/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/partition.hpp"
#include "trajstitch/sampler.hpp"
#include "trajstitch/stitch.hpp"

namespace trajstitch {

void StitchConfig::validate() const {
  if (horizon < 4) throw ConfigError("stitch horizon must be >= 4");
  if (!(delta_threshold > 0.0)) throw ConfigError("qualification threshold must be positive");
  if (iterations < 1) throw ConfigError("stitch iterations must be >= 1");
  if (min_keep < 1) throw ConfigError("min_keep must be >= 1");
  if (batch_size < 1) throw ConfigError("stitch batch size must be >= 1");
}

namespace {

struct PendingAttempt {
  Rng rng;
  int low_index = 0;
  int high_index = 0;
  CutSegment prefix;
  CutSegment suffix;
  RowVector end_norm;
  RowVector join_norm;
  StepEstimate estimate;
};

std::vector<int> eligible(const Dataset& ds, const std::vector<int>& pool, int min_keep) {
  std::vector<int> out;
  for (int i : pool) {
    if (ds.trajectories[static_cast<std::size_t>(i)].length() >= 2 * min_keep - 1) out.push_back(i);
  }
  return out;
}

void run_chunk(const Dataset& dataset, const StitchModels& models, const StitchConfig& config,
               const std::vector<int>& low_pool, const std::vector<int>& high_pool, int first, int count,
               std::vector<StitchCandidate>& out) {
  const NormStats& norm = *models.norm;
  const int horizon = config.horizon;
  std::vector<PendingAttempt> pending(static_cast<std::size_t>(count));
  std::vector<MaskedWindow> windows(static_cast<std::size_t>(count));
  std::vector<Rng> rngs(static_cast<std::size_t>(count));

  for (int j = 0; j < count; ++j) {
    auto& p = pending[static_cast<std::size_t>(j)];
    p.rng = Rng(derive_seed(config.seed, static_cast<std::uint64_t>(first + j)));
    p.low_index = low_pool[static_cast<std::size_t>(uniform_int(p.rng, 0, static_cast<int>(low_pool.size()) - 1))];
    p.high_index = high_pool[static_cast<std::size_t>(uniform_int(p.rng, 0, static_cast<int>(high_pool.size()) - 1))];
    p.prefix = sample_cut_segment(dataset.trajectories[static_cast<std::size_t>(p.low_index)], p.rng,
                                  config.min_keep, CutMode::kPrefix);
    p.suffix = sample_cut_segment(dataset.trajectories[static_cast<std::size_t>(p.high_index)], p.rng,
                                  config.min_keep, CutMode::kSuffix);
    p.end_norm = norm.normalize(p.prefix.cut_state);
    p.join_norm = norm.normalize(p.suffix.cut_state);
    windows[static_cast<std::size_t>(j)] = rollout_mask(p.end_norm, horizon);
  }

  // Imagine continuations of s_T.
  for (int j = 0; j < count; ++j) rngs[static_cast<std::size_t>(j)] = pending[static_cast<std::size_t>(j)].rng;
  const auto imagined = sample_conditional_batch(*models.denoiser, *models.schedule, windows, rngs);

  for (int j = 0; j < count; ++j) {
    auto& p = pending[static_cast<std::size_t>(j)];
    p.estimate = estimate_steps(imagined[static_cast<std::size_t>(j)], p.join_norm);
    windows[static_cast<std::size_t>(j)] =
        build_stitch_mask(p.end_norm, p.estimate.delta, norm.normalize(p.suffix.segment.states), horizon);
  }

  // Generate stitching states; rngs continue from where the imagination left them.
  const auto completed = sample_conditional_batch(*models.denoiser, *models.schedule, windows, rngs);

  for (int j = 0; j < count; ++j) {
    auto& p = pending[static_cast<std::size_t>(j)];
    const Matrix& full = completed[static_cast<std::size_t>(j)];
    const int delta = p.estimate.delta;
    const Matrix stitch_raw = norm.denormalize(Matrix(full.middleRows(1, delta)));

    const auto& high = dataset.trajectories[static_cast<std::size_t>(p.high_index)];
    const int join = p.suffix.cut_index;
    StitchCandidate c;
    c.attempt = first + j;
    c.provenance = StitchProvenance{p.low_index, p.prefix.segment.length(), p.high_index, join, delta};
    c.similarity = std::move(p.estimate.similarity);
    c.stitch = wrap_up(p.prefix.cut_state, stitch_raw, p.suffix.cut_state, high.actions.row(join),
                       high.rewards(join), *models.aux, norm);
    const Qualification q = qualify(c.stitch, models.aux->forward, norm, std::numeric_limits<double>::infinity());
    c.max_error = q.max_error;
    c.errors = q.errors;
    c.generated = assemble_augmented(p.prefix.segment, c.stitch, p.suffix.segment);
    c.generated.provenance = c.provenance;
    out.push_back(std::move(c));
  }
}

}  // namespace

std::vector<StitchCandidate> generate_candidates(const Dataset& dataset, const StitchModels& models,
                                                 const StitchConfig& config) {
  config.validate();
  if (models.denoiser == nullptr || models.schedule == nullptr || models.aux == nullptr || models.norm == nullptr) {
    throw ConfigError("stitching requires trained models and normalization stats");
  }
  if (models.denoiser->horizon != config.horizon) throw ConfigError("denoiser horizon differs from stitch horizon");
  const ReturnPools pools =
      partition_by_return(dataset, config.rank_gamma, config.low_quantile, config.high_quantile);
  const auto low_pool = eligible(dataset, pools.low, config.min_keep);
  const auto high_pool = eligible(dataset, pools.high, config.min_keep);
  if (low_pool.empty() || high_pool.empty()) {
    throw ConfigError("no trajectory in the low or high pool is long enough to cut with min_keep " +
                      std::to_string(config.min_keep));
  }

  std::vector<StitchCandidate> out;
  out.reserve(static_cast<std::size_t>(config.iterations));
  for (int first = 0; first < config.iterations; first += config.batch_size) {
    const int count = std::min(config.batch_size, config.iterations - first);
    run_chunk(dataset, models, config, low_pool, high_pool, first, count, out);
  }
  return out;
}

AugmentationResult select_qualified(const std::vector<StitchCandidate>& candidates, double threshold,
                                    const Dataset& source) {
  AugmentationResult result;
  result.augmented.state_dim = source.state_dim;
  result.augmented.action_dim = source.action_dim;
  auto& stats = result.stats;
  stats.attempts = static_cast<int>(candidates.size());
  for (const auto& c : candidates) {
    stats.delta_histogram[c.provenance.delta] += 1;
    stats.max_errors.push_back(c.max_error);
    if (c.max_error < threshold) {
      result.augmented.trajectories.push_back(c.generated);
      stats.accepted_attempts.push_back(c.attempt);
    }
  }
  stats.accepted = static_cast<int>(stats.accepted_attempts.size());
  stats.acceptance_rate = stats.attempts > 0 ? static_cast<double>(stats.accepted) / stats.attempts : 0.0;
  return result;
}

AugmentationResult run_augmentation(const Dataset& dataset, const StitchModels& models, const StitchConfig& config) {
  auto result = select_qualified(generate_candidates(dataset, models, config), config.delta_threshold, dataset);
  if (result.stats.accepted == 0) {
    warn("no stitch qualified after " + std::to_string(result.stats.attempts) + " attempts; augmented set is empty");
  }
  return result;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

}  // namespace trajstitch
