#include "trajstitch/report.hpp"

#include <iomanip>
#include <sstream>

#include "trajstitch/errors.hpp"
#include "trajstitch/returns.hpp"

namespace trajstitch {

ReturnImprovement return_improvement_report(const Dataset& original, const Dataset& augmented, double gamma) {
  ReturnImprovement out;
  for (const auto& t : augmented.trajectories) {
    if (!t.provenance) continue;
    const auto& p = *t.provenance;
    if (p.low_index < 0 || p.low_index >= static_cast<int>(original.size())) {
      throw SchemaError("augmented trajectory refers to a missing source trajectory");
    }
    const auto before = compute_returns(original.trajectories[static_cast<std::size_t>(p.low_index)], gamma);
    const auto after = compute_returns(t, gamma);
    for (int i = 0; i < p.prefix_length; ++i) {
      const double b = before.return_to_go(i);
      const double a = after.return_to_go(i);
      out.before_after.emplace_back(b, a);
      ++out.states;
      if (a > b) ++out.improved;
    }
  }
  if (out.states > 0) out.fraction_improved = static_cast<double>(out.improved) / out.states;
  return out;
}

std::string return_improvement_csv(const ReturnImprovement& report) {
  std::ostringstream os;
  os << std::setprecision(17) << "before,after\n";
  for (const auto& [b, a] : report.before_after) os << b << ',' << a << '\n';
  return os.str();
}

}  // namespace trajstitch
