#pragma once

namespace xgwas {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Central chi-squared distribution with df degrees of freedom.
double chisq_cdf(double x, double df);
double chisq_sf(double x, double df);

// Lower quantile of the central chi-squared, bracketed root-finding on the
// CDF to 1e-12.
double chisq_quantile(double prob, double df);

// Noncentral chi-squared CDF, Poisson mixture of central chi-squared terms.
// Absolute accuracy ~1e-12; terms truncated once the remaining Poisson tail
// mass is negligible.
double noncentral_chisq_cdf(double x, int df, double ncp);

// Upper tail of the F distribution with (d1, d2) degrees of freedom.
double f_sf(double f, double d1, double d2);

}  // namespace xgwas
