#include "epprobit/special_fn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace epprobit {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
constexpr double kSqrtHalf = 0.70710678118654752440;    // 1/sqrt(2)
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(fn) + ": non-finite input");
    }
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) {
    require_finite(x, "norm_cdf");
    return 0.5 * std::erfc(-x * kSqrtHalf);
}

double log_norm_cdf(double x) {
    require_finite(x, "log_norm_cdf");
    if (x <= kZeta1SwitchX) {
        // Phi = phi/zeta1 with the continued-fraction zeta1.
        return -0.5 * x * x - kLogSqrt2Pi - std::log(detail::zeta1_tail(x));
    }
    if (x >= 0.0) {
        return std::log1p(-0.5 * std::erfc(x * kSqrtHalf));
    }
    return std::log(0.5 * std::erfc(-x * kSqrtHalf));
}

namespace detail {

double mills_excess(double t) {
    // Modified Lentz evaluation of e = 1/(t + 2/(t + 3/(t + ...))).
    constexpr double tiny = 1e-300;
    double f = tiny;
    double c = f;
    double d = 0.0;
    for (int j = 1; j <= 500; ++j) {
        const double a = static_cast<double>(j);
        d = t + a * d;
        if (d == 0.0) d = tiny;
        c = t + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return f;
}

double zeta1_direct(double x) {
    return norm_pdf(x) / (0.5 * std::erfc(-x * kSqrtHalf));
}

double zeta1_tail(double x) {
    const double t = -x;
    return t + mills_excess(t);
}

}  // namespace detail

double zeta1(double x) {
    require_finite(x, "zeta1");
    const double v =
        x <= kZeta1SwitchX ? detail::zeta1_tail(x) : detail::zeta1_direct(x);
    // phi underflows for x beyond ~38.6 while Phi is already 1; clamp so the
    // value stays strictly positive.
    return v > 0.0 ? v : std::numeric_limits<double>::denorm_min();
}

double zeta2(double x) {
    require_finite(x, "zeta2");
    if (x <= kZeta1SwitchX) {
        const double t = -x;
        const double e = detail::mills_excess(t);  // = zeta1(x) + x
        return -(t + e) * e;
    }
    const double z1 = zeta1(x);
    return -z1 * (z1 + x);
}

double norm_quantile(double p) {
    // Algorithm AS 241, PPND16 (Wichura, 1988): rational approximations on
    // three regions of |p - 1/2|, accurate to ~1e-16 relative.
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("norm_quantile: p outside (0,1)");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

}  // namespace epprobit
