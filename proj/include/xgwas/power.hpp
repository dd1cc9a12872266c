#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace xgwas {

struct PowerQuery {
  int df = 1;
  double ncp = 0.0;
  double alpha = 0.05;
};

// P(reject) = 1 - F_{df,ncp}(central quantile at 1 - alpha).
double power(const PowerQuery& q);
double power(int df, double ncp, double alpha);

struct LossSurfaceResult {
  double max_loss = 0.0;
  double argmax_alpha = 0.0;
  double argmax_ncp = 0.0;
  std::string grid_spec;
};

// Maximum of power(df_small) - power(df_large) at equal ncp over a grid in
// (-log10 alpha, ncp), followed by step-halving refinement to 1e-4
// resolution. Grid steps default to 0.01 in -log10 alpha and 0.1 in ncp so
// the landmark numbers are reproducible run to run.
LossSurfaceResult max_power_loss(int df_small, int df_large,
                                 std::pair<double, double> neglog10_alpha_range,
                                 std::pair<double, double> ncp_range,
                                 double alpha_step = 0.01,
                                 double ncp_step = 0.1);

struct PowerGainRow {
  double delta = 0.0;
  double power_small = 0.0;
  double power_large = 0.0;
};

// Power of the small-df test at ncp1 against the large-df test at
// ncp1 + delta, for delta over the given range.
std::vector<PowerGainRow> power_gain_curve(double ncp1,
                                           std::pair<double, double> delta_range,
                                           double delta_step, double alpha,
                                           int df_small, int df_large);

// CSV grid (alpha, ncp, power for df 1..3, pairwise losses) for heat-plot
// reproduction.
void write_power_grid_csv(std::ostream& os,
                          std::pair<double, double> neglog10_alpha_range,
                          std::pair<double, double> ncp_range,
                          double alpha_step, double ncp_step);

}  // namespace xgwas
