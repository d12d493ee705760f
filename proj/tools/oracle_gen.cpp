// Generates the high-precision reference values frozen into the test
// suite. Runs entirely in 50-digit arithmetic (boost::multiprecision),
// so none of the double-precision code under test is involved.
//
// Usage: oracle_gen   (prints name = value pairs to stdout)

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <iomanip>
#include <iostream>
#include <string>

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

const mp kPi = boost::math::constants::pi<mp>();

mp normal_pdf(const mp& x) { return exp(-x * x / 2) / sqrt(2 * kPi); }

mp normal_cdf(const mp& x) { return boost::math::erfc(-x / sqrt(mp(2))) / 2; }

mp zeta1(const mp& x) { return normal_pdf(x) / normal_cdf(x); }

mp zeta2(const mp& x) {
    const mp z1 = zeta1(x);
    return -z1 * z1 - x * z1;
}

struct SiteUpdate {
    mp k, m, tau, s;
};

// Moment-matched site parameters for a probit likelihood factor given the
// cavity quadratic form d = x'Omega x and linear form c = x'xi.
SiteUpdate site_update(int y, const mp& d, const mp& c) {
    SiteUpdate out;
    out.s = mp(2 * y - 1) / sqrt(1 + d);
    out.tau = out.s * c;
    const mp z2 = zeta2(out.tau);
    out.k = -z2 / (1 + d + z2 * d);
    out.m = zeta1(out.tau) * out.s + out.k * c + out.k * zeta1(out.tau) * out.s * d;
    return out;
}

void print(const std::string& name, const mp& value) {
    std::cout << std::setw(34) << std::left << name << " = "
              << std::setprecision(22) << value << "\n";
}

}  // namespace

int main() {
    print("phi_cdf(1.0)", normal_cdf(mp(1)));
    print("phi_cdf(0.5)", normal_cdf(mp("0.5")));
    print("phi_cdf(-3.0)", normal_cdf(mp(-3)));
    print("phi_cdf(-6.0)", normal_cdf(mp(-6)));
    print("phi_cdf(-20.0)", normal_cdf(mp(-20)));
    print("phi_pdf(5.0)", normal_pdf(mp(5)));

    print("zeta1(0)", zeta1(mp(0)));
    print("zeta1(5)", zeta1(mp(5)));
    print("zeta1(-5)", zeta1(mp(-5)));
    print("zeta1(-7.5)", zeta1(mp("-7.5")));
    print("zeta1(-8)", zeta1(mp(-8)));
    print("zeta1(-8.5)", zeta1(mp("-8.5")));
    print("zeta1(-10)", zeta1(mp(-10)));
    print("zeta1(-20)", zeta1(mp(-20)));
    print("zeta1(-50)", zeta1(mp(-50)));
    print("zeta1(-300)", zeta1(mp(-300)));

    print("zeta2(0)", zeta2(mp(0)));
    print("zeta2(5)", zeta2(mp(5)));
    print("zeta2(-10)", zeta2(mp(-10)));
    print("zeta2(-300)", zeta2(mp(-300)));

    // Site update with y = 1, d = 1, c = 0 (tau = 0). Closed forms:
    // k = 1/(pi - 1), m = sqrt(pi)/(pi - 1).
    const SiteUpdate u0 = site_update(1, mp(1), mp(0));
    print("site_update(1,d=1,c=0).k", u0.k);
    print("site_update(1,d=1,c=0).m", u0.m);
    print("1/(pi-1)", 1 / (kPi - 1));
    print("sqrt(pi)/(pi-1)", sqrt(kPi) / (kPi - 1));

    // Large-tau branch: y = 1, d = 1, c = 10.
    const SiteUpdate u1 = site_update(1, mp(1), mp(10));
    print("site_update(1,d=1,c=10).k", u1.k);
    print("site_update(1,d=1,c=10).m", u1.m);
    print("site_update(1,d=1,c=10).tau", u1.tau);

    // Single-site EP fixed point (n=1, p=1, x=1, y=1, nu2=1). One moment
    // match is exact here, so the fixed point equals the skew-normal
    // posterior moments: mean 1/sqrt(pi), variance 1 - 1/pi.
    print("scalar_ep.xi", 1 / sqrt(kPi));
    print("scalar_ep.sigma", 1 - 1 / kPi);

    // Exact predictive for that fixture with x_new = 1:
    // E_post[Phi(beta)] = 2 * E[Phi(Z)^2] = 2/3 with Z ~ N(0,1).
    print("exact_predictive_p1n1", mp(2) / 3);

    // Truncated-normal mean identities used by the sampler tests.
    print("halfnormal_mean", sqrt(2 / kPi));
    print("tn_mean(mu=-8,z>0)", mp(-8) + zeta1(mp(-8)));

    return 0;
}
