#include "xgwas/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace xgwas {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;

// Series expansion of P(a, x), converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum)) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), modified Lentz.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int n = 1; n < kMaxIter; ++n) {
    const double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

namespace {

// Continued fraction for the incomplete beta, modified Lentz.
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("incomplete_beta: parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                std::lgamma(b) + a * std::log(x) +
                                b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chisq_cdf(double x, double df) {
  if (df <= 0.0) throw std::invalid_argument("chisq_cdf: df must be positive");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * df, 0.5 * x);
}

double chisq_sf(double x, double df) {
  if (df <= 0.0) throw std::invalid_argument("chisq_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  if (0.5 * x < 0.5 * df + 1.0) return 1.0 - gamma_p_series(0.5 * df, 0.5 * x);
  return gamma_q_cf(0.5 * df, 0.5 * x);
}

double chisq_quantile(double prob, double df) {
  if (!(prob >= 0.0 && prob < 1.0))
    throw std::invalid_argument("chisq_quantile: prob must be in [0,1)");
  if (prob == 0.0) return 0.0;

  double lo = 0.0;
  double hi = df + 10.0;
  while (chisq_cdf(hi, df) < prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw std::runtime_error("chisq_quantile: bracket failed");
  }
  // Bisection with a secant refinement step; terminates on interval width.
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chisq_cdf(mid, df) < prob)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double noncentral_chisq_cdf(double x, int df, double ncp) {
  if (df <= 0) throw std::invalid_argument("noncentral_chisq_cdf: df must be positive");
  if (x < 0.0) throw std::invalid_argument("noncentral_chisq_cdf: x must be nonnegative");
  if (ncp < 0.0) throw std::invalid_argument("noncentral_chisq_cdf: ncp must be nonnegative");
  if (x == 0.0) return 0.0;
  if (ncp == 0.0) return chisq_cdf(x, df);

  const double lambda = 0.5 * ncp;
  if (lambda > 700.0)
    throw std::invalid_argument("noncentral_chisq_cdf: ncp too large");

  // CDF = sum_j Poisson(j; lambda) * ChisqCdf(x; df + 2j).  The central
  // terms follow the downward recurrence F_{k+2}(x) = F_k(x) - u with
  // u = (x/2)^{k/2} e^{-x/2} / Gamma(k/2 + 1).
  const double half_x = 0.5 * x;
  const double half_df = 0.5 * df;
  double poisson = std::exp(-lambda);  // j = 0
  double central = chisq_cdf(x, df);
  double u = std::exp(half_df * std::log(half_x) - half_x -
                      std::lgamma(half_df + 1.0));
  double cdf = poisson * central;
  double poisson_mass = poisson;
  for (int j = 1; j < 10000; ++j) {
    central -= u;
    if (central < 0.0) central = 0.0;  // guard rounding at the far tail
    u *= half_x / (half_df + j);
    poisson *= lambda / j;
    cdf += poisson * central;
    poisson_mass += poisson;
    // Remaining mass bounds the truncation error since the central CDFs
    // decrease in j.
    const double tail_bound = (1.0 - poisson_mass) * central;
    if (j > lambda && tail_bound < 1e-14) break;
  }
  return std::min(cdf, 1.0);
}

double f_sf(double f, double d1, double d2) {
  if (d1 <= 0.0 || d2 <= 0.0)
    throw std::invalid_argument("f_sf: degrees of freedom must be positive");
  if (f <= 0.0) return 1.0;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

}  // namespace xgwas
