#include "epprobit/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "epprobit/special_fn.hpp"

namespace epprobit {

namespace {

void validate(const QuadratureSpec& spec) {
    if (spec.nodes_per_dim < 101 || spec.nodes_per_dim % 2 == 0) {
        throw std::invalid_argument("QuadratureSpec: nodes_per_dim must be odd and >= 101");
    }
    if (!(spec.half_width >= 6.0)) {
        throw std::invalid_argument("QuadratureSpec: half_width must be >= 6");
    }
}

// Streaming normalized average of phi_val against exp(lp): rescales the
// accumulators whenever a new maximum log-density appears, so the
// likelihood product can be arbitrarily far below the underflow threshold.
class StreamingRatio {
public:
    void add(double lp, double weight, double phi_val) {
        if (!std::isfinite(lp)) {
            if (lp == -std::numeric_limits<double>::infinity()) return;  // zero mass point
            throw std::runtime_error("quadrature: non-finite log posterior");
        }
        if (lp > max_log_) {
            const double scale =
                max_log_ == -std::numeric_limits<double>::infinity() ? 0.0
                                                                     : std::exp(max_log_ - lp);
            den_ *= scale;
            num_ *= scale;
            max_log_ = lp;
        }
        const double w = weight * std::exp(lp - max_log_);
        den_ += w;
        num_ += w * phi_val;
    }

    double ratio() const {
        if (!(den_ > 0.0) || !std::isfinite(den_)) {
            throw std::runtime_error("quadrature: posterior mass vanished numerically");
        }
        return num_ / den_;
    }

private:
    double max_log_ = -std::numeric_limits<double>::infinity();
    double den_ = 0.0;
    double num_ = 0.0;
};

}  // namespace

double exact_predictive_quadrature(const Dataset& data, const Eigen::VectorXd& x_new,
                                   const QuadratureSpec& spec) {
    validate(spec);
    const Eigen::Index p = data.p();
    if (p != 1 && p != 2) {
        throw std::invalid_argument("exact_predictive_quadrature: only p in {1,2} supported");
    }
    if (x_new.size() != p) {
        throw std::invalid_argument("exact_predictive_quadrature: x_new dimension mismatch");
    }

    const double nu2 = data.prior_variance;
    const double half = spec.half_width * std::sqrt(nu2);
    const int N = spec.nodes_per_dim;
    const double step = 2.0 * half / (N - 1);
    const Eigen::VectorXd sign =
        (2 * data.y.cast<double>().array() - 1.0).matrix();

    StreamingRatio acc;
    if (p == 1) {
        for (int j = 0; j < N; ++j) {
            const double b = -half + j * step;
            double lp = -0.5 * b * b / nu2;
            for (Eigen::Index i = 0; i < data.n(); ++i) {
                lp += log_norm_cdf(sign[i] * data.X(i, 0) * b);
            }
            const double w = (j == 0 || j == N - 1) ? 0.5 : 1.0;
            acc.add(lp, w, norm_cdf(x_new[0] * b));
        }
    } else {
        for (int j1 = 0; j1 < N; ++j1) {
            const double b1 = -half + j1 * step;
            const double w1 = (j1 == 0 || j1 == N - 1) ? 0.5 : 1.0;
            for (int j2 = 0; j2 < N; ++j2) {
                const double b2 = -half + j2 * step;
                double lp = -0.5 * (b1 * b1 + b2 * b2) / nu2;
                for (Eigen::Index i = 0; i < data.n(); ++i) {
                    lp += log_norm_cdf(sign[i] * (data.X(i, 0) * b1 + data.X(i, 1) * b2));
                }
                const double w2 = (j2 == 0 || j2 == N - 1) ? 0.5 : 1.0;
                acc.add(lp, w1 * w2, norm_cdf(x_new[0] * b1 + x_new[1] * b2));
            }
        }
    }
    return acc.ratio();
}

double truncated_normal_draw(double mean, Side side, Rng& rng) {
    if (!std::isfinite(mean)) {
        throw std::domain_error("truncated_normal_draw: non-finite mean");
    }
    if (side == Side::LeftOfZero) {
        return -truncated_normal_draw(-mean, Side::RightOfZero, rng);
    }
    const double alpha = -mean;  // standardized truncation point
    if (alpha <= 5.0) {
        const double tail = norm_cdf(-alpha);  // P(T > alpha)
        double z;
        do {
            const double u = rng.uniform01();
            z = mean - norm_quantile((1.0 - u) * tail);
        } while (!(z > 0.0));  // rounding at the boundary can land on 0
        return z;
    }
    // Exponential rejection for a far-tail truncation (Robert, 1995).
    const double lambda = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
    for (;;) {
        const double t = alpha - std::log(rng.uniform01()) / lambda;
        const double gap = t - lambda;
        if (rng.uniform01() <= std::exp(-0.5 * gap * gap)) {
            return mean + t;
        }
    }
}

GibbsResult gibbs_predictive(const Dataset& data, const Eigen::MatrixXd& X_new,
                             const GibbsSpec& spec) {
    if (spec.draws < 1 || spec.burn_in < 0) {
        throw std::invalid_argument("GibbsSpec: need draws >= 1 and burn_in >= 0");
    }
    if (X_new.cols() != data.p()) {
        throw std::invalid_argument("gibbs_predictive: X_new column count mismatch");
    }
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    const Eigen::Index n_test = X_new.rows();

    // beta | z ~ N(C^{-1} X'z, C^{-1}) with C = nu^{-2} I + X'X.
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(p, p) / data.prior_variance;
    C.selfadjointView<Eigen::Lower>().rankUpdate(data.X.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(C.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("gibbs_predictive: coefficient precision not PD");
    }

    Rng rng(spec.seed);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd z(n);
    Eigen::VectorXd eps(p);

    const int nb = std::min(50, spec.draws);  // batch-means batches
    Eigen::MatrixXd batch_sum = Eigen::MatrixXd::Zero(nb, n_test);
    Eigen::VectorXd batch_count = Eigen::VectorXd::Zero(nb);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(n_test);

    const int iterations = spec.burn_in + spec.draws;
    for (int t = 0; t < iterations; ++t) {
        const Eigen::VectorXd eta = data.X * beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            z[i] = truncated_normal_draw(
                eta[i], data.y[i] == 1 ? Side::RightOfZero : Side::LeftOfZero, rng);
        }
        const Eigen::VectorXd mu = llt.solve(data.X.transpose() * z);
        for (Eigen::Index j = 0; j < p; ++j) eps[j] = rng.normal();
        beta = mu + llt.matrixU().solve(eps);
        if (!beta.allFinite()) {
            throw std::runtime_error("gibbs_predictive: non-finite draw at iteration " +
                                     std::to_string(t));
        }
        if (t < spec.burn_in) continue;

        const int d = t - spec.burn_in;
        const int batch = static_cast<int>(static_cast<long>(d) * nb / spec.draws);
        const Eigen::VectorXd score = X_new * beta;
        for (Eigen::Index j = 0; j < n_test; ++j) {
            const double val = norm_cdf(score[j]);
            total[j] += val;
            batch_sum(batch, j) += val;
        }
        batch_count[batch] += 1.0;
    }

    GibbsResult out;
    out.probabilities = total / static_cast<double>(spec.draws);
    out.standard_errors.resize(n_test);
    for (Eigen::Index j = 0; j < n_test; ++j) {
        if (nb < 2) {
            out.standard_errors[j] = std::numeric_limits<double>::infinity();
            continue;
        }
        double mean = 0.0;
        for (int b = 0; b < nb; ++b) mean += batch_sum(b, j) / batch_count[b];
        mean /= nb;
        double ss = 0.0;
        for (int b = 0; b < nb; ++b) {
            const double diff = batch_sum(b, j) / batch_count[b] - mean;
            ss += diff * diff;
        }
        out.standard_errors[j] = std::sqrt(ss / (nb - 1) / nb);
    }
    return out;
}

McEstimate mc_gaussian_expectation(const GaussianPosterior& post, const Eigen::VectorXd& x_new,
                                   long samples, std::uint64_t seed) {
    if (samples < 1000) {
        throw std::invalid_argument("mc_gaussian_expectation: need at least 1000 samples");
    }
    if (x_new.size() != post.dim()) {
        throw std::invalid_argument("mc_gaussian_expectation: x_new dimension mismatch");
    }
    const double center = x_new.dot(post.xi);
    const Eigen::MatrixXd sigma = assemble_covariance(post);

    if (sigma.isZero(0.0)) {
        // Point-mass posterior: the expectation is Phi(x'xi) exactly.
        return McEstimate{norm_cdf(center), 0.0};
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("mc_gaussian_expectation: covariance factorization failed");
    }
    // x'(xi + L e) = center + (L'x)'e, so only the projected direction is
    // needed per draw.
    const Eigen::VectorXd proj = llt.matrixL().transpose() * x_new;

    Rng rng(seed);
    const Eigen::Index p = post.dim();
    double sum = 0.0;
    double sumsq = 0.0;
    for (long s = 0; s < samples; ++s) {
        double dot = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) dot += proj[j] * rng.normal();
        const double val = norm_cdf(center + dot);
        sum += val;
        sumsq += val * val;
    }
    const double mean = sum / static_cast<double>(samples);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(samples) - mean * mean);
    return McEstimate{mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace epprobit
