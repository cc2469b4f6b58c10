#pragma once

#include <span>
#include <vector>

#include "trajstitch/denoiser.hpp"
#include "trajstitch/masked_window.hpp"
#include "trajstitch/schedule.hpp"

namespace trajstitch {

// Reverse process for k = K..1:
//   x_{k-1} = (x_k - (1 - a_k)/sqrt(1 - abar_k) * eps_theta(x_k, cond, k)) / sqrt(a_k)
//             + sqrt(1 - a_k) * z,   z = 0 at k = 1,
// followed after every step by overwriting observed positions with their
// conditioning values. The result matches the conditioning bit-exactly at
// observed positions.
Matrix sample_conditional(const DenoiserModel& model, const NoiseSchedule& schedule,
                          const MaskedWindow& masked, Rng& rng);

// Batched form; window i draws all of its noise from rngs[i], so each result
// is independent of how windows are grouped into batches.
std::vector<Matrix> sample_conditional_batch(const DenoiserModel& model, const NoiseSchedule& schedule,
                                             std::span<const MaskedWindow> windows, std::span<Rng> rngs);

// Window conditioned only on its first position.
MaskedWindow rollout_mask(const RowVector& start_state, int horizon);

// H-length continuation of start_state (normalized); row 0 is start_state.
Matrix imagine_rollout(const DenoiserModel& model, const NoiseSchedule& schedule,
                       const RowVector& start_state, Rng& rng);

}  // namespace trajstitch
