#include "xgwas/glm.hpp"

#include <cmath>
#include <stdexcept>

namespace xgwas {

namespace {

constexpr double kEtaTol = 1e-10;
constexpr int kMaxIter = 100;
constexpr double kSeparationBound = 30.0;

double inv_logit(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

Eigen::VectorXd glm_weights(const Eigen::VectorXd& mu, Family family) {
  if (family == Family::Linear) return Eigen::VectorXd::Ones(mu.size());
  return mu.array() * (1.0 - mu.array());
}

double estimate_dispersion(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                           Family family) {
  if (y.size() != mu.size())
    throw std::invalid_argument("estimate_dispersion: length mismatch");
  if (family == Family::Logistic) return 1.0;
  return (y - mu).squaredNorm() / static_cast<double>(y.size());
}

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                      Family family) {
  const auto n = static_cast<double>(y.size());
  if (family == Family::Linear) {
    // Profile log-likelihood at the variance MLE rss/n.
    const double rss = (y - mu).squaredNorm();
    return -0.5 * n * (std::log(2.0 * M_PI * rss / n) + 1.0);
  }
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double m = std::min(std::max(mu(i), 1e-300), 1.0 - 1e-16);
    ll += y(i) > 0.5 ? std::log(m) : std::log1p(-m);
  }
  return ll;
}

namespace {

// One IRLS solve on the active column set.
struct IrlsState {
  Eigen::VectorXd beta;
  Eigen::VectorXd eta;
  int iterations = 0;
  bool converged = false;
};

IrlsState irls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               Family family) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  IrlsState st;
  st.beta = Eigen::VectorXd::Zero(p);
  st.eta = Eigen::VectorXd::Zero(n);

  for (int it = 1; it <= kMaxIter; ++it) {
    Eigen::VectorXd mu(n), w(n), z(n);
    if (family == Family::Linear) {
      mu = st.eta;
      w.setOnes();
      z = y;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = inv_logit(st.eta(i));
        mu(i) = m;
        const double v = m * (1.0 - m);
        w(i) = v;
        z(i) = st.eta(i) + (y(i) - m) / v;
      }
    }

    const Eigen::ArrayXd sw = w.array().sqrt();
    const Eigen::MatrixXd xw = sw.matrix().asDiagonal() * x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw std::runtime_error("singular design");
    const Eigen::VectorXd beta_new = qr.solve((sw * z.array()).matrix());
    const Eigen::VectorXd eta_new = x * beta_new;

    if (family == Family::Logistic &&
        eta_new.cwiseAbs().maxCoeff() > kSeparationBound)
      throw std::runtime_error("separation detected");

    const double delta = (eta_new - st.eta).cwiseAbs().maxCoeff();
    st.beta = beta_new;
    st.eta = eta_new;
    st.iterations = it;
    if (delta < kEtaTol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

}  // namespace

FitResult fit(const DesignMatrix& x, const Eigen::VectorXd& y, Family family,
              bool constrain_tested) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  if (y.size() != n) throw std::invalid_argument("fit: response length mismatch");
  if (n <= p) throw std::invalid_argument("fit: need n > p");
  if (family == Family::Logistic)
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) != 0.0 && y(i) != 1.0)
        throw std::invalid_argument("fit: logistic response must be 0/1");

  std::vector<char> drop(p, 0);
  if (constrain_tested) {
    if (x.tested_columns.empty())
      throw std::invalid_argument("fit: empty tested block");
    for (int j : x.tested_columns) drop.at(j) = 1;
  }

  Eigen::MatrixXd active(n, p);
  std::vector<int> active_cols;
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    if (!drop[j]) {
      active.col(col++) = x.values.col(j);
      active_cols.push_back(static_cast<int>(j));
    }
  active.conservativeResize(n, col);

  const IrlsState st = irls(active, y, family);

  FitResult out;
  out.beta = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < col; ++j) out.beta(active_cols[j]) = st.beta(j);
  out.family = family;
  out.eta = st.eta;
  out.mu = family == Family::Linear
               ? st.eta
               : st.eta.unaryExpr([](double e) { return inv_logit(e); }).eval();
  out.dispersion = estimate_dispersion(y, out.mu, family);
  out.loglik = log_likelihood(y, out.mu, family);
  out.iterations = st.iterations;
  out.converged = st.converged;
  out.constrained = constrain_tested;
  if (constrain_tested) out.tested_columns = x.tested_columns;
  return out;
}

}  // namespace xgwas
