#pragma once

#include <Eigen/Dense>

#include "epprobit/ep.hpp"

namespace epprobit::detail {

// Hybrid (extended skew-normal) parameters from an explicit covariance.
// Shared by both engines' diagnostic paths.
HybridSnParams hybrid_from_dense(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& r,
                                 double k_i, double m_i, const Eigen::VectorXd& x, int y);

}  // namespace epprobit::detail
