#include "xgwas/power.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "xgwas/distributions.hpp"

namespace xgwas {

namespace {

void check_df(int df) {
  if (df < 1 || df > 10)
    throw std::invalid_argument("power: df restricted to 1..10");
}

double power_at(int df, double ncp, double quantile) {
  return 1.0 - noncentral_chisq_cdf(quantile, df, ncp);
}

}  // namespace

double power(int df, double ncp, double alpha) {
  check_df(df);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("power: alpha must be in (0,1)");
  if (ncp < 0.0 || !std::isfinite(ncp))
    throw std::invalid_argument("power: ncp must be finite and nonnegative");
  return power_at(df, ncp, chisq_quantile(1.0 - alpha, df));
}

double power(const PowerQuery& q) { return power(q.df, q.ncp, q.alpha); }

LossSurfaceResult max_power_loss(int df_small, int df_large,
                                 std::pair<double, double> neglog10_alpha_range,
                                 std::pair<double, double> ncp_range,
                                 double alpha_step, double ncp_step) {
  check_df(df_small);
  check_df(df_large);
  if (df_small >= df_large)
    throw std::invalid_argument("max_power_loss: need df_small < df_large");
  if (neglog10_alpha_range.second < neglog10_alpha_range.first ||
      ncp_range.second < ncp_range.first)
    throw std::invalid_argument("max_power_loss: empty range");

  const auto loss_at = [&](double la, double ncp) {
    const double alpha = std::pow(10.0, -la);
    if (alpha >= 1.0) return 0.0;  // -log10(alpha) = 0 boundary has no power gap
    const double q_s = chisq_quantile(1.0 - alpha, df_small);
    const double q_l = chisq_quantile(1.0 - alpha, df_large);
    return power_at(df_small, ncp, q_s) - power_at(df_large, ncp, q_l);
  };

  LossSurfaceResult best;
  best.max_loss = -1.0;
  double best_la = neglog10_alpha_range.first;

  const int n_alpha = static_cast<int>(
      std::floor((neglog10_alpha_range.second - neglog10_alpha_range.first) /
                 alpha_step + 1e-9)) + 1;
  const int n_ncp = static_cast<int>(
      std::floor((ncp_range.second - ncp_range.first) / ncp_step + 1e-9)) + 1;

  for (int ia = 0; ia < n_alpha; ++ia) {
    const double la = neglog10_alpha_range.first + ia * alpha_step;
    const double alpha = std::pow(10.0, -la);
    if (alpha >= 1.0) continue;
    const double q_s = chisq_quantile(1.0 - alpha, df_small);
    const double q_l = chisq_quantile(1.0 - alpha, df_large);
    for (int in = 0; in < n_ncp; ++in) {
      const double ncp = ncp_range.first + in * ncp_step;
      const double loss = power_at(df_small, ncp, q_s) -
                          power_at(df_large, ncp, q_l);
      if (loss > best.max_loss) {
        best.max_loss = loss;
        best_la = la;
        best.argmax_ncp = ncp;
      }
    }
  }

  // Step-halving refinement around the grid argmax.
  double step_la = alpha_step;
  double step_ncp = ncp_step;
  double la = best_la;
  double ncp = best.argmax_ncp;
  while (step_la > 1e-4 || step_ncp > 1e-4) {
    step_la = std::max(0.5 * step_la, 1e-4);
    step_ncp = std::max(0.5 * step_ncp, 1e-4);
    bool moved = true;
    while (moved) {
      moved = false;
      for (int da = -1; da <= 1; ++da) {
        for (int dn = -1; dn <= 1; ++dn) {
          if (da == 0 && dn == 0) continue;
          const double cand_la = std::clamp(la + da * step_la,
                                            neglog10_alpha_range.first,
                                            neglog10_alpha_range.second);
          const double cand_ncp =
              std::clamp(ncp + dn * step_ncp, ncp_range.first, ncp_range.second);
          const double loss = loss_at(cand_la, cand_ncp);
          if (loss > best.max_loss) {
            best.max_loss = loss;
            la = cand_la;
            ncp = cand_ncp;
            moved = true;
          }
        }
      }
    }
  }

  best.argmax_alpha = std::pow(10.0, -la);
  best.argmax_ncp = ncp;
  std::ostringstream spec;
  spec << "-log10(alpha) in [" << neglog10_alpha_range.first << ","
       << neglog10_alpha_range.second << "] step " << alpha_step
       << "; ncp in [" << ncp_range.first << "," << ncp_range.second
       << "] step " << ncp_step << "; refined to 1e-4";
  best.grid_spec = spec.str();
  return best;
}

std::vector<PowerGainRow> power_gain_curve(double ncp1,
                                           std::pair<double, double> delta_range,
                                           double delta_step, double alpha,
                                           int df_small, int df_large) {
  if (delta_range.first < 0.0)
    throw std::invalid_argument("power_gain_curve: delta must be nonnegative");
  const double q_s = chisq_quantile(1.0 - alpha, df_small);
  const double q_l = chisq_quantile(1.0 - alpha, df_large);
  const double p_small = power_at(df_small, ncp1, q_s);
  std::vector<PowerGainRow> rows;
  for (double d = delta_range.first; d <= delta_range.second + 1e-12;
       d += delta_step)
    rows.push_back({d, p_small, power_at(df_large, ncp1 + d, q_l)});
  return rows;
}

void write_power_grid_csv(std::ostream& os,
                          std::pair<double, double> neglog10_alpha_range,
                          std::pair<double, double> ncp_range,
                          double alpha_step, double ncp_step) {
  os << "neglog10_alpha,alpha,ncp,power_df1,power_df2,power_df3,"
        "loss_2v1,loss_3v1,loss_3v2\n";
  for (double la = neglog10_alpha_range.first;
       la <= neglog10_alpha_range.second + 1e-12; la += alpha_step) {
    const double alpha = std::pow(10.0, -la);
    if (alpha >= 1.0) continue;
    const double q1 = chisq_quantile(1.0 - alpha, 1);
    const double q2 = chisq_quantile(1.0 - alpha, 2);
    const double q3 = chisq_quantile(1.0 - alpha, 3);
    for (double ncp = ncp_range.first; ncp <= ncp_range.second + 1e-12;
         ncp += ncp_step) {
      const double p1 = power_at(1, ncp, q1);
      const double p2 = power_at(2, ncp, q2);
      const double p3 = power_at(3, ncp, q3);
      os << la << ',' << alpha << ',' << ncp << ',' << p1 << ',' << p2 << ','
         << p3 << ',' << (p1 - p2) << ',' << (p1 - p3) << ',' << (p2 - p3)
         << '\n';
    }
  }
}

}  // namespace xgwas
