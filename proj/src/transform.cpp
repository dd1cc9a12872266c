#include "xgwas/transform.hpp"

#include <algorithm>
#include <stdexcept>

namespace xgwas {

namespace {

// Columns rearranged as (untested | tested).
Eigen::MatrixXd partitioned(const DesignMatrix& x) {
  const auto p = x.p();
  std::vector<char> tested(p, 0);
  for (int j : x.tested_columns) tested.at(j) = 1;
  Eigen::MatrixXd out(x.n(), p);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    if (!tested[j]) out.col(col++) = x.values.col(j);
  for (Eigen::Index j = 0; j < p; ++j)
    if (tested[j]) out.col(col++) = x.values.col(j);
  return out;
}

bool invertible(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  return sv.size() > 0 && sv(sv.size() - 1) > 1e-10 * sv(0);
}

}  // namespace

std::optional<TransformationWitness> find_transformation(
    const DesignMatrix& x1, const DesignMatrix& x2, double tol) {
  if (x1.n() != x2.n() || x1.p() != x2.p() || x1.q() != x2.q())
    throw std::invalid_argument("design shape mismatch");
  const Eigen::Index p = x1.p();
  const int q = x1.q();
  const Eigen::Index r = p - q;

  const Eigen::MatrixXd a = partitioned(x1);
  const Eigen::MatrixXd b = partitioned(x2);
  const Eigen::MatrixXd a1 = a.leftCols(r);

  TransformationWitness w;
  // T1 from X21 = X11 T1; the trailing block of T from X22 = X1 (T12' T2')'.
  w.T1 = a1.colPivHouseholderQr().solve(b.leftCols(r));
  const Eigen::MatrixXd right = a.colPivHouseholderQr().solve(b.rightCols(q));
  w.T12 = right.topRows(r);
  w.T2 = right.bottomRows(q);

  w.T.setZero(p, p);
  w.T.topLeftCorner(r, r) = w.T1;
  w.T.topRightCorner(r, q) = w.T12;
  w.T.bottomRightCorner(q, q) = w.T2;

  const double res_full = (b - a * w.T).cwiseAbs().maxCoeff();
  const double res_null = (b.leftCols(r) - a1 * w.T1).cwiseAbs().maxCoeff();
  w.residual_norm = std::max(res_full, res_null);

  const double scale = b.cwiseAbs().maxCoeff();
  if (w.residual_norm > tol * std::max(1.0, scale)) return std::nullopt;
  if (!invertible(w.T1) || !invertible(w.T2)) return std::nullopt;
  return w;
}

}  // namespace xgwas
