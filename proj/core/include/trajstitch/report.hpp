#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trajstitch/trajectory.hpp"

namespace trajstitch {

struct ReturnImprovement {
  // Unset when there is no augmented trajectory with provenance.
  std::optional<double> fraction_improved;
  int states = 0;
  int improved = 0;
  std::vector<std::pair<double, double>> before_after;
};

// For each low-side prefix state of every augmented trajectory, compare its
// return-to-go in the source trajectory with the one in the stitched result.
ReturnImprovement return_improvement_report(const Dataset& original, const Dataset& augmented, double gamma);

// "before,after" rows with a header line.
std::string return_improvement_csv(const ReturnImprovement& report);

}  // namespace trajstitch
