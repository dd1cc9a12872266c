#pragma once

#include <Eigen/Dense>
#include <vector>

#include "xgwas/coding.hpp"

namespace xgwas {

struct FitResult {
  Eigen::VectorXd beta;  // length p; exactly zero at tested columns when constrained
  Eigen::VectorXd eta;   // linear predictor X * beta
  Eigen::VectorXd mu;    // fitted means
  Family family = Family::Linear;
  double dispersion = 1.0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool constrained = false;
  std::vector<int> tested_columns;  // empty if unconstrained
};

// IRLS from beta = 0, iterating until max|X beta_new - X beta_old| < 1e-10
// or 100 iterations. The constrained fit drops the tested columns and
// re-embeds zeros. Throws "singular design" on rank deficiency and
// "separation detected" when a logistic linear predictor exceeds 30 in
// magnitude; plain non-convergence is reported, not thrown.
FitResult fit(const DesignMatrix& x, const Eigen::VectorXd& y, Family family,
              bool constrain_tested);

// Pearson dispersion with divisor n. Logistic dispersion is fixed at 1.
double estimate_dispersion(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                           Family family);

// Unnormalized IRLS weights at mu: 1 for linear, mu(1-mu) for logistic.
Eigen::VectorXd glm_weights(const Eigen::VectorXd& mu, Family family);

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                      Family family);

}  // namespace xgwas
