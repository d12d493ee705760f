#pragma once

// Scalar special functions shared by the EP updates, the predictive
// formula and the samplers: standard normal pdf/cdf, log-cdf, quantile,
// and the log-cdf derivatives zeta1 = phi/Phi, zeta2 = -zeta1^2 - x*zeta1.
//
// zeta1 and zeta2 stay accurate far into the left tail, where the naive
// ratio phi(x)/Phi(x) underflows: below kZeta1SwitchX they are evaluated
// through the Laplace continued fraction for the reciprocal Mills ratio
// instead of the erfc-based cdf.

namespace epprobit {

// Direct-quotient / continued-fraction crossover for zeta1 and zeta2.
inline constexpr double kZeta1SwitchX = -8.0;

double norm_pdf(double x);

// Phi(x). Throws std::domain_error on non-finite input.
double norm_cdf(double x);

// log Phi(x), stable for arbitrarily negative x.
double log_norm_cdf(double x);

// Inverse of Phi on (0,1), AS 241 (Wichura, 1988). Throws
// std::domain_error outside the open interval.
double norm_quantile(double p);

// phi(x)/Phi(x) > 0. Throws std::domain_error on non-finite input.
double zeta1(double x);

// -zeta1(x)^2 - x*zeta1(x), strictly inside (-1, 0).
double zeta2(double x);

namespace detail {

// zeta1(-t) - t for t > 0 via the continued fraction
//   zeta1(-t) = t + 1/(t + 2/(t + 3/(t + ...))).
// The excess is the small factor that keeps zeta2 = -(t+e)*e away from -1
// without cancellation.
double mills_excess(double t);

// The two evaluation routes for zeta1, exposed so the seam between them
// can be tested directly.
double zeta1_direct(double x);
double zeta1_tail(double x);

}  // namespace detail

}  // namespace epprobit
