#pragma once

#include <Eigen/Dense>
#include <optional>

#include "xgwas/coding.hpp"

namespace xgwas {

// Witness of a block-upper-triangular design equivalence: X2 = X1 * T and
// X21 = X11 * T1 with T1, T2 invertible, where columns are arranged as
// (untested | tested). Two designs related this way yield identical Wald,
// Score and LRT statistics for the tested block.
struct TransformationWitness {
  Eigen::MatrixXd T;    // p x p, zero lower-left block
  Eigen::MatrixXd T1;   // (p-q) x (p-q)
  Eigen::MatrixXd T12;  // (p-q) x q
  Eigen::MatrixXd T2;   // q x q
  double residual_norm = 0.0;
};

// Least-squares search for the witness. Returns std::nullopt (a verdict,
// not an error) when the residual exceeds tol * max|X2| or a diagonal block
// is numerically singular. Columns of both designs are internally permuted
// to (untested | tested) order; T is reported in that arrangement.
std::optional<TransformationWitness> find_transformation(
    const DesignMatrix& x1, const DesignMatrix& x2, double tol = 1e-8);

}  // namespace xgwas
