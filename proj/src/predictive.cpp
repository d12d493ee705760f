#include "epprobit/predictive.hpp"

#include <cmath>
#include <string>

#include "epprobit/special_fn.hpp"

namespace epprobit {

namespace {

double quadratic_form(const GaussianPosterior& post, const Eigen::VectorXd& x) {
    double u;
    double scale;  // cancellation tolerance scale for a numerically negative u
    if (const auto* dense = std::get_if<DenseCovariance>(&post.covariance)) {
        u = x.dot(dense->sigma * x);
        scale = dense->sigma.diagonal().cwiseAbs().maxCoeff();
    } else {
        const auto& f = std::get<FactoredCovariance>(post.covariance);
        const Eigen::VectorXd vt = f.V.transpose() * x;
        const Eigen::VectorXd xt = f.X * x;
        u = f.prior_variance * (x.squaredNorm() - vt.dot(f.k.cwiseProduct(xt)));
        scale = f.prior_variance;
    }
    if (u < 0.0) {
        const double eps = 1e-10 * scale * x.squaredNorm();
        if (u < -eps) {
            throw NumericalBreakdownError(
                "predict: quadratic form " + std::to_string(u) + " is negative");
        }
        u = 0.0;
    }
    return u;
}

}  // namespace

PredictiveResult predict_one(const GaussianPosterior& post, const Eigen::VectorXd& x_new) {
    if (x_new.size() != post.dim()) {
        throw std::invalid_argument("predict_one: x_new has dimension " +
                                    std::to_string(x_new.size()) + ", posterior has " +
                                    std::to_string(post.dim()));
    }
    PredictiveResult res;
    res.u = quadratic_form(post, x_new);
    res.linear = x_new.dot(post.xi);
    res.probability = norm_cdf(res.linear / std::sqrt(1.0 + res.u));
    return res;
}

std::vector<PredictiveResult> predict_batch(const GaussianPosterior& post,
                                            const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != post.dim()) {
        throw std::invalid_argument("predict_batch: covariate columns " +
                                    std::to_string(X_new.cols()) + ", posterior has " +
                                    std::to_string(post.dim()));
    }
    std::vector<PredictiveResult> out;
    out.reserve(static_cast<std::size_t>(X_new.rows()));
    for (Eigen::Index i = 0; i < X_new.rows(); ++i) {
        out.push_back(predict_one(post, X_new.row(i).transpose()));
    }
    return out;
}

}  // namespace epprobit
