#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "epprobit/dataset.hpp"
#include "epprobit/posterior.hpp"
#include "epprobit/rng.hpp"

namespace epprobit {

// Ground-truth generators used to verify the closed-form EP results.
// These paths share no state with the engines: the quadrature integrates
// the exact posterior directly, the Gibbs sampler targets it by data
// augmentation, and the Monte Carlo routine brute-forces the Gaussian
// expectation behind the predictive formula.

struct QuadratureSpec {
    double half_width = 10.0;  // integration box half-width, in prior std deviations
    int nodes_per_dim = 2001;  // odd, >= 101
};

// Tensor-grid integration of Phi(x_new'beta) against the exact posterior
// for p in {1, 2}, evaluated in log space with max subtraction so the
// likelihood product cannot underflow. Returns the normalized predictive
// probability.
double exact_predictive_quadrature(const Dataset& data, const Eigen::VectorXd& x_new,
                                   const QuadratureSpec& spec = {});

struct GibbsSpec {
    int burn_in = 2000;
    int draws = 10000;
    std::uint64_t seed = 1;
};

struct GibbsResult {
    Eigen::VectorXd probabilities;    // one per row of X_new
    Eigen::VectorXd standard_errors;  // batch-means standard errors
};

// Data-augmentation Gibbs sampler for the probit posterior: latent
// truncated-normal utilities given the coefficients, then a Gaussian
// coefficient draw given the utilities (Albert & Chib, 1993). Predictive
// probabilities are averages of Phi(x_new'beta) over the retained draws.
GibbsResult gibbs_predictive(const Dataset& data, const Eigen::MatrixXd& X_new,
                             const GibbsSpec& spec);

enum class Side { RightOfZero, LeftOfZero };

// Draw from a unit-variance normal with the given mean, truncated to
// z > 0 or z < 0. Inverse-cdf for moderate means, exponential rejection
// (Robert, 1995) deep in the tail.
double truncated_normal_draw(double mean, Side side, Rng& rng);

struct McEstimate {
    double estimate;
    double standard_error;
};

// Monte Carlo estimate of E_q[Phi(x_new'beta)] over the Gaussian
// approximation q; validates the closed-form predictive.
McEstimate mc_gaussian_expectation(const GaussianPosterior& post, const Eigen::VectorXd& x_new,
                                   long samples, std::uint64_t seed);

}  // namespace epprobit
