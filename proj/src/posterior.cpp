#include "epprobit/posterior.hpp"

namespace epprobit {

Eigen::MatrixXd assemble_covariance(const FactoredCovariance& cov) {
    const Eigen::Index p = cov.V.rows();
    Eigen::MatrixXd sigma = cov.prior_variance * Eigen::MatrixXd::Identity(p, p);
    sigma.noalias() -= cov.prior_variance * cov.V * cov.k.asDiagonal() * cov.X;
    return sigma;
}

Eigen::MatrixXd assemble_covariance(const GaussianPosterior& post) {
    if (const auto* dense = std::get_if<DenseCovariance>(&post.covariance)) {
        return dense->sigma;
    }
    return assemble_covariance(std::get<FactoredCovariance>(post.covariance));
}

}  // namespace epprobit
