#pragma once

#include <Eigen/Core>

namespace craftmaps {

// Examples are rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace craftmaps
