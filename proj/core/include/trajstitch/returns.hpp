#pragma once

#include "trajstitch/tensor.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

struct ReturnIndex {
  double gamma = 1.0;
  double total = 0.0;     // equals return_to_go(0)
  Vector return_to_go;    // G_t = r_t + gamma * G_{t+1}, G_T = r_T
};

// Throws ConfigError unless 0 < gamma <= 1.
ReturnIndex compute_returns(const Trajectory& trajectory, double gamma);

}  // namespace trajstitch
