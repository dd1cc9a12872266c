#pragma once

#include <Eigen/Dense>
#include <optional>

#include "xgwas/glm.hpp"

namespace xgwas {

enum class TestKind { Wald, Score, Lrt, F };

struct TestResult {
  TestKind kind = TestKind::Wald;
  double statistic = 0.0;
  int df = 0;                // q, the tested block size
  std::optional<int> df2;    // n - p, F test only
  double p_value = 1.0;
};

std::string test_name(TestKind k);

// F statistic for the tested block, linear family only:
// (RSS_null - RSS_full)/q over RSS_full/(n-p), with an exact F p-value.
TestResult f_test(const DesignMatrix& x, const Eigen::VectorXd& y,
                  const FitResult& fit_full, const FitResult& fit_null);

// Wald statistic beta2' [ (X'WX)^-1_{22} ]^-1 beta2 / phi_hat with W the
// unnormalized IRLS weights at the unconstrained fit. In the linear family
// this satisfies Wald = n q F / (n - p) exactly.
TestResult wald_test(const DesignMatrix& x, const FitResult& fit_full,
                     Family family);

// Score statistic in the Cordeiro form, all quantities from the
// null-constrained fit. In the linear family this equals
// n q F / (q F + n - p).
TestResult score_test(const DesignMatrix& x, const Eigen::VectorXd& y,
                      const FitResult& fit_null, Family family);

// 2 (loglik_full - loglik_null); the linear family uses the profile form
// n log(RSS_null / RSS_full) = n log(1 + qF/(n-p)).
TestResult lrt_test(const DesignMatrix& x, const FitResult& fit_full,
                    const FitResult& fit_null, Family family);

}  // namespace xgwas
