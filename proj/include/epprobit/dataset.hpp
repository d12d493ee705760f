#pragma once

#include <Eigen/Dense>

namespace epprobit {

// Binary-response design with a spherical Gaussian prior on the
// coefficients: rows of X are the covariate vectors, y holds 0/1 labels,
// prior_variance is the common prior variance of each coefficient.
struct Dataset {
    Eigen::MatrixXd X;      // n x p
    Eigen::VectorXi y;      // entries in {0, 1}
    double prior_variance;  // > 0

    // Validates shapes, label values, finiteness and the prior variance;
    // throws std::invalid_argument on violation.
    Dataset(Eigen::MatrixXd X_in, Eigen::VectorXi y_in, double prior_variance_in);

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

}  // namespace epprobit
