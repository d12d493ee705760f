#include <cmath>
#include <stdexcept>
#include <utility>

#include "epprobit/ep.hpp"
#include "ep_internal.hpp"

namespace epprobit {

EpStateLowRank::EpStateLowRank(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {
    if (!data_) {
        throw std::invalid_argument("EpStateLowRank: null dataset");
    }
    // With zero sites, Q^{-1} = nu2 * I, so v_i = nu2 * x_i.
    v_ = data_->prior_variance * data_->X.transpose();
    r_ = Eigen::VectorXd::Zero(data_->p());
    sites_.k = Eigen::VectorXd::Zero(data_->n());
    sites_.m = Eigen::VectorXd::Zero(data_->n());
}

std::optional<Cavity> EpStateLowRank::cavity(Eigen::Index i) const {
    const auto x = data_->X.row(i).transpose();
    const auto v = v_.col(i);
    const double xv = x.dot(v);
    const double denom = 1.0 - sites_.k[i] * xv;
    if (denom <= kCavityEpsilon) {
        return std::nullopt;
    }
    Cavity cav;
    cav.w = v / denom;
    cav.d = xv / denom;
    cav.c = (v.dot(r_) - sites_.m[i] * xv) / denom;  // w'(r - m_i x)
    return cav;
}

std::optional<UpdateDeltas> EpStateLowRank::apply_update(Eigen::Index i, double k_new,
                                                         double m_new, double damping) {
    const double k_old = sites_.k[i];
    const double m_old = sites_.m[i];
    const double k_next = (1.0 - damping) * k_old + damping * k_new;
    const double m_next = (1.0 - damping) * m_old + damping * m_new;
    const double dk = k_next - k_old;
    const double dm = m_next - m_old;
    if (dk == 0.0 && dm == 0.0) {
        return UpdateDeltas{0.0, 0.0};
    }
    const Eigen::VectorXd x = data_->X.row(i).transpose();
    const Eigen::VectorXd vi = v_.col(i);  // snapshot: column i changes below
    const double denom = 1.0 + dk * x.dot(vi);
    if (denom <= kCavityEpsilon) {
        return std::nullopt;
    }
    const double g = dk / denom;
    // Sherman-Morrison applied to every tracked vector at once:
    // v_j <- v_j - g (v_i'x_j) v_i, with all v_i'x_j given by X v_i.
    const Eigen::VectorXd t = data_->X * vi;
    v_.noalias() -= g * vi * t.transpose();
    r_ += dm * x;
    sites_.k[i] = k_next;
    sites_.m[i] = m_next;
    return UpdateDeltas{std::abs(dk), std::abs(dm)};
}

Eigen::VectorXd EpStateLowRank::mean() const {
    // Q^{-1} r = nu2 * (r - V K X r) from the factored covariance identity.
    const double nu2 = data_->prior_variance;
    const Eigen::VectorXd xr = data_->X * r_;
    return nu2 * (r_ - v_ * sites_.k.cwiseProduct(xr));
}

Eigen::MatrixXd EpStateLowRank::dense_sigma() const {
    const double nu2 = data_->prior_variance;
    const Eigen::Index p = data_->p();
    Eigen::MatrixXd sigma = nu2 * Eigen::MatrixXd::Identity(p, p);
    sigma.noalias() -= nu2 * v_ * sites_.k.asDiagonal() * data_->X;
    return sigma;
}

HybridSnParams EpStateLowRank::hybrid_params(Eigen::Index i) const {
    return detail::hybrid_from_dense(dense_sigma(), r_, sites_.k[i], sites_.m[i],
                                     data_->X.row(i).transpose(), data_->y[i]);
}

GaussianPosterior EpStateLowRank::posterior() const {
    return GaussianPosterior{
        mean(), FactoredCovariance{data_->prior_variance, v_, sites_.k, data_->X}};
}

}  // namespace epprobit
