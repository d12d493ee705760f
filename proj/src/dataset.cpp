#include "epprobit/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace epprobit {

Dataset::Dataset(Eigen::MatrixXd X_in, Eigen::VectorXi y_in, double prior_variance_in)
    : X(std::move(X_in)), y(std::move(y_in)), prior_variance(prior_variance_in) {
    if (X.rows() < 1 || X.cols() < 1) {
        throw std::invalid_argument("Dataset: need n >= 1 and p >= 1");
    }
    if (y.size() != X.rows()) {
        throw std::invalid_argument("Dataset: label count " + std::to_string(y.size()) +
                                    " does not match row count " + std::to_string(X.rows()));
    }
    if (!(std::isfinite(prior_variance) && prior_variance > 0.0)) {
        throw std::invalid_argument("Dataset: prior variance must be finite and positive");
    }
    if (!X.allFinite()) {
        throw std::invalid_argument("Dataset: design matrix has non-finite entries");
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) {
            throw std::invalid_argument("Dataset: label at row " + std::to_string(i) +
                                        " is " + std::to_string(y[i]) + ", expected 0 or 1");
        }
    }
}

}  // namespace epprobit
