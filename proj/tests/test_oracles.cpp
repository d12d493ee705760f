#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "epprobit/ep.hpp"
#include "epprobit/oracles.hpp"
#include "epprobit/predictive.hpp"
#include "epprobit/special_fn.hpp"
#include "support/frozen_values.hpp"
#include "support/test_oracles.hpp"

using namespace epprobit;

namespace {

Dataset p1_single() {
    Eigen::MatrixXd X(1, 1);
    X << 1.0;
    Eigen::VectorXi y(1);
    y << 1;
    return Dataset(X, y, 1.0);
}

Eigen::VectorXd vec1(double v) {
    Eigen::VectorXd x(1);
    x << v;
    return x;
}

}  // namespace

TEST_CASE("quadrature recovers the analytic predictive of the scalar fixture") {
    // E_post[Phi(beta)] = 2/3 exactly for this fixture.
    const double got = exact_predictive_quadrature(p1_single(), vec1(1.0));
    CHECK(std::abs(got - frozen::kExactPredictiveP1N1) < 1e-10);
}

TEST_CASE("quadrature with only constant likelihood factors returns one half") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2, 1);
    Eigen::VectorXi y(2);
    y << 1, 0;
    const Dataset d(X, y, 25.0);
    CHECK(std::abs(exact_predictive_quadrature(d, vec1(0.7)) - 0.5) < 1e-12);
}

TEST_CASE("quadrature respects the probit sign symmetry") {
    // Flipping every label mirrors the posterior, so the flipped-model
    // predictive at x equals the original at -x, which is also one minus
    // the original at x.
    Eigen::MatrixXd X(3, 1);
    X << 0.8, -0.4, 1.6;
    Eigen::VectorXi y1(3), y0(3);
    y1 << 1, 1, 0;
    y0 << 0, 0, 1;  // flipped labels
    const Dataset d1(X, y1, 4.0);
    const Dataset d0(X, y0, 4.0);
    const double orig = exact_predictive_quadrature(d1, vec1(0.9));
    const double flip_at_x = exact_predictive_quadrature(d0, vec1(0.9));
    const double orig_at_neg = exact_predictive_quadrature(d1, vec1(-0.9));
    CHECK(std::abs(flip_at_x - orig_at_neg) < 1e-10);
    CHECK(std::abs(flip_at_x - (1.0 - orig)) < 1e-10);
}

TEST_CASE("quadrature is node-doubling stable") {
    const Dataset d = p1_single();
    const double coarse = exact_predictive_quadrature(d, vec1(1.0), {10.0, 501});
    const double fine = exact_predictive_quadrature(d, vec1(1.0), {10.0, 1001});
    CHECK(std::abs(coarse - fine) < 1e-8);

    Eigen::MatrixXd X(4, 2);
    X << 0.5, -1.0, 1.2, 0.3, -0.8, 0.9, 0.2, 1.5;
    Eigen::VectorXi y(4);
    y << 1, 0, 1, 1;
    const Dataset d2(X, y, 9.0);
    Eigen::VectorXd x_new(2);
    x_new << 0.4, -0.6;
    const double c2 = exact_predictive_quadrature(d2, x_new, {10.0, 401});
    const double f2 = exact_predictive_quadrature(d2, x_new, {10.0, 801});
    CHECK(std::abs(c2 - f2) < 1e-8);
    CHECK(c2 > 0.0);
    CHECK(c2 < 1.0);
}

TEST_CASE("quadrature validates its inputs") {
    const Dataset d = p1_single();
    CHECK_THROWS_AS(exact_predictive_quadrature(d, vec1(1.0), {10.0, 500}),
                    std::invalid_argument);  // even
    CHECK_THROWS_AS(exact_predictive_quadrature(d, vec1(1.0), {10.0, 99}),
                    std::invalid_argument);  // too few
    CHECK_THROWS_AS(exact_predictive_quadrature(d, vec1(1.0), {4.0, 501}),
                    std::invalid_argument);  // box too narrow
    CHECK_THROWS_AS(exact_predictive_quadrature(d, Eigen::VectorXd::Zero(2)),
                    std::invalid_argument);  // dimension mismatch
    const Dataset wide = test_support::random_dataset(4, 3, 1.0, 51);
    CHECK_THROWS_AS(exact_predictive_quadrature(wide, Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);  // p > 2 unsupported
}

TEST_CASE("EP predictive sits within 0.02 of the exact quadrature") {
    const Dataset d = p1_single();
    const GaussianPosterior post = fit(d, EpConfig{1e-10, 200, 1.0}).posterior;
    const double ep = predict_one(post, vec1(1.0)).probability;
    const double exact = exact_predictive_quadrature(d, vec1(1.0));
    CHECK(std::abs(ep - exact) <= 0.02);
}

TEST_CASE("truncated normal draws respect their support") {
    Rng rng(61);
    for (double mean : {-8.0, -2.0, 0.0, 3.0, 7.5}) {
        CAPTURE(mean);
        for (int t = 0; t < 20000; ++t) {
            CHECK(truncated_normal_draw(mean, Side::RightOfZero, rng) > 0.0);
        }
        for (int t = 0; t < 2000; ++t) {
            CHECK(truncated_normal_draw(mean, Side::LeftOfZero, rng) < 0.0);
        }
    }
    CHECK_THROWS_AS(
        truncated_normal_draw(std::numeric_limits<double>::quiet_NaN(), Side::RightOfZero, rng),
        std::domain_error);
}

TEST_CASE("truncated normal sample moments match the zeta1 identities") {
    constexpr long kDraws = 1000000;
    SUBCASE("half normal") {
        Rng rng(62);
        double sum = 0.0, sumsq = 0.0;
        for (long t = 0; t < kDraws; ++t) {
            const double z = truncated_normal_draw(0.0, Side::RightOfZero, rng);
            sum += z;
            sumsq += z * z;
        }
        const double mean = sum / kDraws;
        const double sd = std::sqrt(sumsq / kDraws - mean * mean);
        CHECK(std::abs(mean - frozen::kHalfNormalMean) <= 4.0 * sd / std::sqrt(double(kDraws)));
    }
    SUBCASE("far-tail rejection branch, E[z] = mu + zeta1(mu)") {
        Rng rng(63);
        double sum = 0.0, sumsq = 0.0;
        for (long t = 0; t < kDraws; ++t) {
            const double z = truncated_normal_draw(-8.0, Side::RightOfZero, rng);
            sum += z;
            sumsq += z * z;
        }
        const double mean = sum / kDraws;
        const double sd = std::sqrt(sumsq / kDraws - mean * mean);
        CHECK(std::abs(mean - frozen::kTnMeanMuMinus8) <= 4.0 * sd / std::sqrt(double(kDraws)));
        CHECK(std::abs(mean - (-8.0 + zeta1(-8.0))) <= 4.0 * sd / std::sqrt(double(kDraws)));
    }
}

TEST_CASE("gibbs averaging stage: constant Phi values average exactly") {
    // Zero test covariates make every retained value Phi(0) = 1/2.
    Eigen::MatrixXd X(4, 2);
    X << 0.5, -1.0, 1.2, 0.3, -0.8, 0.9, 0.2, 1.5;
    Eigen::VectorXi y(4);
    y << 1, 0, 1, 1;
    const Dataset d(X, y, 4.0);
    const GibbsResult res = gibbs_predictive(d, Eigen::MatrixXd::Zero(2, 2), {100, 500, 7});
    CHECK(res.probabilities[0] == 0.5);
    CHECK(res.probabilities[1] == 0.5);
    CHECK(res.standard_errors[0] == 0.0);
}

TEST_CASE("gibbs agrees with quadrature on the scalar fixture") {
    const Dataset d = p1_single();
    Eigen::MatrixXd X_new(1, 1);
    X_new << 1.0;
    const GibbsResult res = gibbs_predictive(d, X_new, {2000, 50000, 8});
    const double exact = exact_predictive_quadrature(d, vec1(1.0));
    CHECK(res.standard_errors[0] > 0.0);
    CHECK(std::abs(res.probabilities[0] - exact) <= 3.0 * res.standard_errors[0]);
}

TEST_CASE("gibbs is bitwise deterministic in its seed") {
    const Dataset d = test_support::random_dataset(12, 3, 9.0, 64);
    Eigen::MatrixXd X_new(3, 3);
    X_new << 1.0, 0.0, -0.5, 0.2, 0.7, 0.1, -1.0, 0.4, 0.9;
    const GibbsSpec spec{200, 1000, 12345};
    const GibbsResult a = gibbs_predictive(d, X_new, spec);
    const GibbsResult b = gibbs_predictive(d, X_new, spec);
    CHECK(a.probabilities == b.probabilities);
    CHECK(a.standard_errors == b.standard_errors);
    const GibbsResult c = gibbs_predictive(d, X_new, {200, 1000, 54321});
    CHECK(a.probabilities != c.probabilities);
}

TEST_CASE("gibbs validates its spec") {
    const Dataset d = p1_single();
    Eigen::MatrixXd X_new(1, 1);
    X_new << 1.0;
    CHECK_THROWS_AS(gibbs_predictive(d, X_new, {100, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(gibbs_predictive(d, X_new, {-1, 100, 1}), std::invalid_argument);
    CHECK_THROWS_AS(gibbs_predictive(d, Eigen::MatrixXd::Zero(1, 3), {100, 100, 1}),
                    std::invalid_argument);
}

TEST_CASE("monte carlo expectation over the Gaussian approximation") {
    SUBCASE("centered posterior gives one half") {
        GaussianPosterior post{Eigen::VectorXd::Zero(3),
                               DenseCovariance{Eigen::MatrixXd::Identity(3, 3)}};
        Eigen::VectorXd x(3);
        x << 0.4, -0.8, 1.2;
        const McEstimate est = mc_gaussian_expectation(post, x, 100000, 71);
        CHECK(std::abs(est.estimate - 0.5) <= 3.0 * est.standard_error);
    }
    SUBCASE("point mass reduces to Phi of the linear score") {
        GaussianPosterior post{Eigen::VectorXd::Ones(2),
                               DenseCovariance{Eigen::MatrixXd::Zero(2, 2)}};
        Eigen::VectorXd x(2);
        x << 0.3, 0.4;
        const McEstimate est = mc_gaussian_expectation(post, x, 1000, 72);
        CHECK(est.estimate == norm_cdf(0.7));
        CHECK(est.standard_error == 0.0);
    }
    SUBCASE("sample-size precondition") {
        GaussianPosterior post{Eigen::VectorXd::Zero(2),
                               DenseCovariance{Eigen::MatrixXd::Identity(2, 2)}};
        CHECK_THROWS_AS(mc_gaussian_expectation(post, Eigen::VectorXd::Zero(2), 999, 73),
                        std::invalid_argument);
    }
    SUBCASE("seed determinism") {
        GaussianPosterior post{Eigen::VectorXd::Zero(2),
                               DenseCovariance{Eigen::MatrixXd::Identity(2, 2)}};
        Eigen::VectorXd x(2);
        x << 1.0, -1.0;
        const McEstimate a = mc_gaussian_expectation(post, x, 5000, 99);
        const McEstimate b = mc_gaussian_expectation(post, x, 5000, 99);
        CHECK(a.estimate == b.estimate);
        CHECK(a.standard_error == b.standard_error);
    }
}

TEST_CASE("oracle outputs stay inside the open unit interval") {
    const Dataset d = test_support::random_dataset(10, 2, 25.0, 74);
    Eigen::MatrixXd X_new(4, 2);
    X_new << 0.5, -0.5, 2.0, 1.0, -1.5, 0.3, 0.0, 0.0;
    const GibbsResult g = gibbs_predictive(d, X_new, {200, 2000, 9});
    for (Eigen::Index j = 0; j < X_new.rows(); ++j) {
        CHECK(g.probabilities[j] > 0.0);
        CHECK(g.probabilities[j] < 1.0);
        const double q =
            exact_predictive_quadrature(d, X_new.row(j).transpose(), {10.0, 401});
        CHECK(q > 0.0);
        CHECK(q < 1.0);
    }
}
