#pragma once

#include <vector>

#include "trajstitch/aux_models.hpp"
#include "trajstitch/denoiser.hpp"
#include "trajstitch/masked_window.hpp"
#include "trajstitch/normalizer.hpp"
#include "trajstitch/schedule.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

inline constexpr double kDegenerateNorm = 1e-12;

// u.v / (|u||v|); 0 (with a warning) when either norm is below 1e-12.
double cosine_similarity(const RowVector& u, const RowVector& v);

struct StepEstimate {
  int delta = 1;
  // similarity[i - 1] = sim(imagined row i, target) for i = 1..H-2.
  std::vector<double> similarity;
};

// Delta = argmax over i in {1, ..., H-2} of sim(imagined row i, target),
// smallest i on ties. Row 0 of `imagined` is the start state itself.
StepEstimate estimate_steps(const Matrix& imagined, const RowVector& target);

// Window [end_state, MASK x delta, high_states[0], high_states[1], ...]
// truncated to `horizon`; positions with no high state left stay masked.
MaskedWindow build_stitch_mask(const RowVector& end_state, int delta, const Matrix& high_states, int horizon);

// Completes the stitch window and returns its rows 1..delta.
Matrix generate_stitch_states(const DenoiserModel& model, const NoiseSchedule& schedule, const MaskedWindow& mask,
                              int delta, Rng& rng);

// States are raw; the models see them normalized. Returns the delta+2 tuple
// stitching trajectory (s_T, a~_T, r~_T), (s~_i, a~_i, r~_i)..., (s'_1, a'_1, r'_1)
// whose last tuple is copied verbatim from the join arguments.
Trajectory wrap_up(const RowVector& end_state, const Matrix& stitch_states, const RowVector& join_state,
                   const RowVector& join_action, double join_reward, const AuxModels& models,
                   const NormStats& norm);

struct Qualification {
  bool accepted = false;
  double max_error = 0.0;
  std::vector<double> errors;  // one per (s_t, a_t, s_{t+1}) in the stitch, delta+1 terms
};

// Squared forward-model error in normalized space; accepted iff max < threshold.
Qualification qualify(const Trajectory& stitch, const ForwardDynamicsModel& forward, const NormStats& norm,
                      double threshold);

// prefix tuples 0..T-2, then the whole stitch, then suffix tuples 1..T'-1.
Trajectory assemble_augmented(const Trajectory& low_prefix, const Trajectory& stitch,
                              const Trajectory& high_suffix);

}  // namespace trajstitch
