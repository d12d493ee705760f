#pragma once

#include <Eigen/Dense>
#include <variant>

namespace epprobit {

// Explicit p x p covariance of the Gaussian approximation.
struct DenseCovariance {
    Eigen::MatrixXd sigma;
};

// Low-rank factors of the same covariance:
//   sigma = nu2 * I - nu2 * V * diag(k) * X,
// with V the p x n matrix of vectors v_i = Q^{-1} x_i, k the site precision
// scalars and X the n x p design matrix.
struct FactoredCovariance {
    double prior_variance;  // nu2
    Eigen::MatrixXd V;      // p x n
    Eigen::VectorXd k;      // n
    Eigen::MatrixXd X;      // n x p
};

// Final Gaussian approximation q(beta) = N(xi, covariance).
struct GaussianPosterior {
    Eigen::VectorXd xi;
    std::variant<DenseCovariance, FactoredCovariance> covariance;

    Eigen::Index dim() const { return xi.size(); }
    bool is_dense() const { return std::holds_alternative<DenseCovariance>(covariance); }
};

// Materializes the covariance as a dense matrix; for the factored form this
// evaluates nu2*I - nu2*V*K*X.
Eigen::MatrixXd assemble_covariance(const FactoredCovariance& cov);
Eigen::MatrixXd assemble_covariance(const GaussianPosterior& post);

}  // namespace epprobit
