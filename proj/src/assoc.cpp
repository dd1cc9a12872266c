#include "xgwas/assoc.hpp"

#include <cmath>
#include <stdexcept>

#include "xgwas/distributions.hpp"

namespace xgwas {

std::string test_name(TestKind k) {
  switch (k) {
    case TestKind::Wald: return "wald";
    case TestKind::Score: return "score";
    case TestKind::Lrt: return "lrt";
    case TestKind::F: return "f";
  }
  return "?";
}

namespace {

void require_converged(const FitResult& f, const char* what) {
  if (!f.converged)
    throw std::runtime_error(std::string(what) + ": fit did not converge");
}

void require_tested(const DesignMatrix& x) {
  if (x.tested_columns.empty())
    throw std::invalid_argument("test: empty tested block");
}

Eigen::MatrixXd tested_cols(const DesignMatrix& x) {
  Eigen::MatrixXd out(x.n(), x.q());
  for (int j = 0; j < x.q(); ++j)
    out.col(j) = x.values.col(x.tested_columns[j]);
  return out;
}

Eigen::MatrixXd untested_cols(const DesignMatrix& x) {
  std::vector<char> tested(x.p(), 0);
  for (int j : x.tested_columns) tested.at(j) = 1;
  Eigen::MatrixXd out(x.n(), x.p() - x.q());
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < x.p(); ++j)
    if (!tested[j]) out.col(col++) = x.values.col(j);
  return out;
}

}  // namespace

TestResult f_test(const DesignMatrix& x, const Eigen::VectorXd& y,
                  const FitResult& fit_full, const FitResult& fit_null) {
  require_tested(x);
  if (fit_full.family != Family::Linear || fit_null.family != Family::Linear)
    throw std::invalid_argument("F-test requires linear family");
  if (fit_full.constrained || !fit_null.constrained)
    throw std::invalid_argument("f_test: expects (unconstrained, constrained) fits");
  require_converged(fit_full, "f_test");
  require_converged(fit_null, "f_test");

  const auto n = static_cast<double>(x.n());
  const auto p = static_cast<double>(x.p());
  const int q = x.q();
  const double rss_full = (y - fit_full.mu).squaredNorm();
  const double rss_null = (y - fit_null.mu).squaredNorm();

  TestResult r;
  r.kind = TestKind::F;
  r.df = q;
  r.df2 = static_cast<int>(n - p);
  r.statistic = ((rss_null - rss_full) / q) / (rss_full / (n - p));
  if (r.statistic < 0.0 && r.statistic > -1e-12) r.statistic = 0.0;
  r.p_value = f_sf(r.statistic, q, n - p);
  return r;
}

TestResult wald_test(const DesignMatrix& x, const FitResult& fit_full,
                     Family family) {
  require_tested(x);
  if (fit_full.constrained)
    throw std::invalid_argument("wald_test: fit must be unconstrained");
  require_converged(fit_full, "wald_test");

  const Eigen::VectorXd w = glm_weights(fit_full.mu, family);
  const Eigen::MatrixXd xtwx =
      x.values.transpose() * w.asDiagonal() * x.values;
  const Eigen::MatrixXd cov = xtwx.ldlt().solve(
      Eigen::MatrixXd::Identity(x.p(), x.p()));

  const int q = x.q();
  Eigen::MatrixXd c22(q, q);
  Eigen::VectorXd b2(q);
  for (int i = 0; i < q; ++i) {
    b2(i) = fit_full.beta(x.tested_columns[i]);
    for (int j = 0; j < q; ++j)
      c22(i, j) = cov(x.tested_columns[i], x.tested_columns[j]);
  }

  TestResult r;
  r.kind = TestKind::Wald;
  r.df = q;
  r.statistic = b2.dot(c22.ldlt().solve(b2)) / fit_full.dispersion;
  if (r.statistic < 0.0) r.statistic = 0.0;
  r.p_value = chisq_sf(r.statistic, q);
  return r;
}

TestResult score_test(const DesignMatrix& x, const Eigen::VectorXd& y,
                      const FitResult& fit_null, Family family) {
  require_tested(x);
  if (!fit_null.constrained)
    throw std::invalid_argument("score_test: fit must be constrained");
  require_converged(fit_null, "score_test");

  const Eigen::MatrixXd x1 = untested_cols(x);
  const Eigen::MatrixXd x2 = tested_cols(x);
  const Eigen::VectorXd w = glm_weights(fit_null.mu, family);

  // R = X2 - X1 (X1' W X1)^-1 X1' W X2, the tested block residualized
  // against the null covariates in the W metric.
  const Eigen::MatrixXd x1twx1 = x1.transpose() * w.asDiagonal() * x1;
  const Eigen::MatrixXd x1twx2 = x1.transpose() * w.asDiagonal() * x2;
  const Eigen::MatrixXd r_mat = x2 - x1 * x1twx1.ldlt().solve(x1twx2);

  // For linear and logistic (canonical links) V^{-1/2} W^{1/2} = 1, so the
  // weighted score reduces to X2'(y - mu).
  const Eigen::VectorXd u = x2.transpose() * (y - fit_null.mu);
  const Eigen::MatrixXd m = r_mat.transpose() * w.asDiagonal() * r_mat;

  TestResult r;
  r.kind = TestKind::Score;
  r.df = x.q();
  r.statistic = u.dot(m.ldlt().solve(u)) / fit_null.dispersion;
  if (r.statistic < 0.0) r.statistic = 0.0;
  r.p_value = chisq_sf(r.statistic, r.df);
  return r;
}

TestResult lrt_test(const DesignMatrix& x, const FitResult& fit_full,
                    const FitResult& fit_null, Family /*family*/) {
  require_tested(x);
  if (fit_full.constrained || !fit_null.constrained)
    throw std::invalid_argument("lrt_test: expects (unconstrained, constrained) fits");
  require_converged(fit_full, "lrt_test");
  require_converged(fit_null, "lrt_test");

  double stat = 2.0 * (fit_full.loglik - fit_null.loglik);
  if (stat < -1e-8) throw std::runtime_error("nesting violated");
  if (stat < 0.0) stat = 0.0;

  TestResult r;
  r.kind = TestKind::Lrt;
  r.df = x.q();
  r.statistic = stat;
  r.p_value = chisq_sf(stat, r.df);
  return r;
}

}  // namespace xgwas
