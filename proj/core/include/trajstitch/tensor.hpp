#pragma once

#include <Eigen/Dense>

namespace trajstitch {

// Row-major so that a batch is a stack of contiguous rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace trajstitch
