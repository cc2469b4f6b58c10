#include "trajstitch/returns.hpp"

#include "trajstitch/errors.hpp"

namespace trajstitch {

ReturnIndex compute_returns(const Trajectory& trajectory, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  const Eigen::Index n = trajectory.rewards.size();
  if (n == 0) throw SchemaError("compute_returns: empty trajectory");
  ReturnIndex out;
  out.gamma = gamma;
  out.return_to_go.resize(n);
  out.return_to_go(n - 1) = trajectory.rewards(n - 1);
  for (Eigen::Index t = n - 1; t-- > 0;) {
    out.return_to_go(t) = trajectory.rewards(t) + gamma * out.return_to_go(t + 1);
  }
  out.total = out.return_to_go(0);
  return out;
}

}  // namespace trajstitch
