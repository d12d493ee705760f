#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "epprobit/dataset.hpp"
#include "epprobit/posterior.hpp"

namespace epprobit {

enum class Engine { Auto, Dense, LowRank };

struct EpConfig {
    double tol = 1e-6;     // convergence threshold on max site-parameter change
    int max_sweeps = 200;
    double damping = 1.0;  // natural-parameter interpolation factor, (0, 1]
};

// Per-site natural parameters: site i contributes k_i * x_i x_i' to the
// precision and m_i * x_i to the shift.
struct SiteState {
    Eigen::VectorXd k;
    Eigen::VectorXd m;
};

struct FitDiagnostics {
    int sweeps_run = 0;
    bool converged = false;
    std::vector<double> max_delta_trace;  // per sweep: max_i max(|dk_i|, |dm_i|)
    long skipped_updates = 0;             // cavity breakdowns + rejected updates
    double elapsed_seconds = 0.0;
    Engine engine_used = Engine::Dense;
};

// Eq-removed ("cavity") quantities for one site.
struct Cavity {
    Eigen::VectorXd w;  // Omega_i x_i = Q_{-i}^{-1} x_i
    double d;           // x_i' Omega_i x_i
    double c;           // w' r_{-i} = x_i' xi_i
};

struct SiteUpdateResult {
    double k;
    double m;
    double tau;
    double s;
};

struct UpdateDeltas {
    double dk;
    double dm;
};

// Moment-matched site parameters from the cavity forms d = x'Omega x and
// c = x'xi. Requires d > 0 (throws std::domain_error otherwise); the
// returned k is always strictly positive because zeta2 lies in (-1, 0).
SiteUpdateResult site_update(int y, double d, double c);

// Cavity / update guard: denominators at or below this are treated as
// breakdown and the site is skipped for the sweep.
inline constexpr double kCavityEpsilon = 1e-12;

// Extended skew-normal parameters of the hybrid distribution at site i.
// Diagnostic surface only; built densely at O(p^3).
struct HybridSnParams {
    Eigen::VectorXd xi;     // cavity mean
    Eigen::MatrixXd Omega;  // cavity covariance
    Eigen::VectorXd alpha;  // (2y-1) * omega .* x
    double tau = 0.0;
    Eigen::VectorXd omega;  // sqrt(diag(Omega))
};

class CavityBreakdownError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonProgressError : public std::runtime_error {
public:
    NonProgressError(const std::string& what, FitDiagnostics diag);
    const FitDiagnostics diagnostics;
};

// Gaussian approximation state with the covariance held explicitly.
// One site visit costs O(p^2).
class EpStateDense {
public:
    explicit EpStateDense(std::shared_ptr<const Dataset> data);
    explicit EpStateDense(const Dataset& data)
        : EpStateDense(std::make_shared<const Dataset>(data)) {}

    // nullopt on cavity breakdown (1 - k_i x_i'v_i <= kCavityEpsilon).
    std::optional<Cavity> cavity(Eigen::Index i) const;

    // Damped rank-one refresh of sigma and r; nullopt if the update was
    // rejected (state unchanged).
    std::optional<UpdateDeltas> apply_update(Eigen::Index i, double k_new, double m_new,
                                             double damping = 1.0);

    HybridSnParams hybrid_params(Eigen::Index i) const;

    Eigen::VectorXd mean() const { return sigma_ * r_; }
    GaussianPosterior posterior() const;

    const Eigen::MatrixXd& sigma() const { return sigma_; }
    const Eigen::VectorXd& r() const { return r_; }
    const SiteState& sites() const { return sites_; }
    const Dataset& data() const { return *data_; }

private:
    std::shared_ptr<const Dataset> data_;
    Eigen::MatrixXd sigma_;
    Eigen::VectorXd r_;
    SiteState sites_;
};

// Same approximation tracked through the p-vectors v_i = Q^{-1} x_i only.
// One site visit costs O(pn); no p x p matrix is ever formed on this path.
class EpStateLowRank {
public:
    explicit EpStateLowRank(std::shared_ptr<const Dataset> data);
    explicit EpStateLowRank(const Dataset& data)
        : EpStateLowRank(std::make_shared<const Dataset>(data)) {}

    std::optional<Cavity> cavity(Eigen::Index i) const;

    std::optional<UpdateDeltas> apply_update(Eigen::Index i, double k_new, double m_new,
                                             double damping = 1.0);

    HybridSnParams hybrid_params(Eigen::Index i) const;

    Eigen::VectorXd mean() const;
    // Materializes the covariance from the factors (diagnostics only).
    Eigen::MatrixXd dense_sigma() const;
    GaussianPosterior posterior() const;

    const Eigen::MatrixXd& v() const { return v_; }
    const Eigen::VectorXd& r() const { return r_; }
    const SiteState& sites() const { return sites_; }
    const Dataset& data() const { return *data_; }

private:
    std::shared_ptr<const Dataset> data_;
    Eigen::MatrixXd v_;  // p x n, column i = Q^{-1} x_i
    Eigen::VectorXd r_;
    SiteState sites_;
};

struct FitResult {
    GaussianPosterior posterior;
    SiteState sites;
    FitDiagnostics diagnostics;
};

// Full EP fixed-point iteration: deterministic ascending sweeps over the
// sites until the largest site-parameter change falls below cfg.tol or
// cfg.max_sweeps is reached. Engine::Auto picks dense when p <= n.
// Sites with a zero covariate row are permanently inactive (their
// likelihood factor is constant); a sweep in which every active site was
// skipped for breakdown throws NonProgressError.
FitResult fit(const Dataset& data, const EpConfig& cfg = {}, Engine engine = Engine::Auto);

}  // namespace epprobit
