#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "epprobit/ep.hpp"
#include "ep_internal.hpp"

namespace epprobit {

namespace detail {

HybridSnParams hybrid_from_dense(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& r,
                                 double k_i, double m_i, const Eigen::VectorXd& x, int y) {
    const Eigen::VectorXd v = sigma * x;
    const double xv = x.dot(v);
    const double denom = 1.0 - k_i * xv;
    if (denom <= kCavityEpsilon) {
        throw CavityBreakdownError("hybrid_params: cavity breakdown");
    }
    HybridSnParams h;
    // Sherman-Morrison add-back of the removed site precision.
    h.Omega = sigma + (k_i / denom) * (v * v.transpose());
    h.xi = h.Omega * (r - m_i * x);
    h.omega = h.Omega.diagonal().cwiseSqrt();
    const double sgn = 2.0 * y - 1.0;
    h.alpha = sgn * h.omega.cwiseProduct(x);
    const double d = x.dot(h.Omega * x);
    h.tau = sgn * x.dot(h.xi) / std::sqrt(1.0 + d);
    return h;
}

}  // namespace detail

EpStateDense::EpStateDense(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {
    if (!data_) {
        throw std::invalid_argument("EpStateDense: null dataset");
    }
    const Eigen::Index p = data_->p();
    sigma_ = data_->prior_variance * Eigen::MatrixXd::Identity(p, p);
    r_ = Eigen::VectorXd::Zero(p);
    sites_.k = Eigen::VectorXd::Zero(data_->n());
    sites_.m = Eigen::VectorXd::Zero(data_->n());
}

std::optional<Cavity> EpStateDense::cavity(Eigen::Index i) const {
    const Eigen::VectorXd x = data_->X.row(i).transpose();
    const Eigen::VectorXd v = sigma_ * x;
    const double xv = x.dot(v);
    const double denom = 1.0 - sites_.k[i] * xv;
    if (denom <= kCavityEpsilon) {
        return std::nullopt;
    }
    Cavity cav;
    cav.w = v / denom;
    cav.d = xv / denom;
    cav.c = cav.w.dot(r_) - sites_.m[i] * cav.d;  // w'(r - m_i x), using w'x = d
    return cav;
}

std::optional<UpdateDeltas> EpStateDense::apply_update(Eigen::Index i, double k_new,
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
    const Eigen::VectorXd v = sigma_ * x;
    const double denom = 1.0 + dk * x.dot(v);
    if (denom <= kCavityEpsilon) {
        return std::nullopt;
    }
    sigma_.noalias() -= (dk / denom) * (v * v.transpose());
    r_ += dm * x;
    sites_.k[i] = k_next;
    sites_.m[i] = m_next;
    return UpdateDeltas{std::abs(dk), std::abs(dm)};
}

HybridSnParams EpStateDense::hybrid_params(Eigen::Index i) const {
    return detail::hybrid_from_dense(sigma_, r_, sites_.k[i], sites_.m[i],
                                     data_->X.row(i).transpose(), data_->y[i]);
}

GaussianPosterior EpStateDense::posterior() const {
    return GaussianPosterior{mean(), DenseCovariance{sigma_}};
}

}  // namespace epprobit
