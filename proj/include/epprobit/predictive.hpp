#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "epprobit/posterior.hpp"

namespace epprobit {

class NumericalBreakdownError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// probability = Phi(linear / sqrt(1 + u)) with linear = x_new'xi and
// u = x_new' Sigma x_new, the predictive quadratic form.
struct PredictiveResult {
    double probability;
    double u;
    double linear;
};

// Closed-form predictive probability of a positive label for one new
// covariate vector. The dense covariance evaluates u at O(p^2); the
// factored form uses u = nu2*[x'x - (V'x)' K (X x)] at O(pn). A quadratic
// form more negative than the cancellation tolerance throws
// NumericalBreakdownError; tiny negatives are clamped to zero.
PredictiveResult predict_one(const GaussianPosterior& post, const Eigen::VectorXd& x_new);

// Row-wise predictive probabilities; identical to calling predict_one on
// each row of X_new.
std::vector<PredictiveResult> predict_batch(const GaussianPosterior& post,
                                            const Eigen::MatrixXd& X_new);

}  // namespace epprobit
