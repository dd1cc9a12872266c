#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "xgwas/coding.hpp"

namespace xgwas {

struct PopulationSpec {
  double f_female = 0.5;  // risk-allele frequency in females
  double f_male = 0.5;    // risk-allele frequency in males
  double sex_ratio = 0.5; // proportion male
  bool hwe = true;        // female genotype frequencies (1-f)^2, 2f(1-f), f^2

  void validate() const;
};

// Averaged effect per genotype group; mu_r/mu_R apply to X-chromosome males
// and are ignored for autosome work. sigma2 = 4 makes linear and logistic
// asymptotic non-centrality coincide.
struct EffectSpec {
  double mu_rr = 0.0;
  double mu_rR = 0.0;
  double mu_RR = 0.0;
  double mu_r = 0.0;
  double mu_R = 0.0;
  double sigma2 = 4.0;
  Family family = Family::Linear;
};

// One genotype-sex cell of the population, with its probability, its coded
// group mean, and (for X) the five-state layout (rr, rR, RR, r, R).
struct PopulationState {
  Genotype genotype;
  Sex sex = Sex::Female;
  double prob = 0.0;
  double mean = 0.0;
};

std::vector<PopulationState> enumerate_states(const PopulationSpec& pop,
                                              const EffectSpec& effects,
                                              ChromosomeKind kind);

// Limit of X'X/n for the model's coded columns: closed-form expectations of
// covariate products over the genotype-sex cells.
Eigen::MatrixXd moment_matrix(const PopulationSpec& pop, const ModelSpec& spec);

// Same, under the starred (reparametrized) codings.
Eigen::MatrixXd moment_matrix_reparametrized(const PopulationSpec& pop,
                                             const ModelSpec& spec);

// Fisher-partition non-centrality for a correctly specified model:
// beta2' [H22 - H21 H11^-1 H12] beta2 with H = X'X/sigma2 (linear) or
// X'W(beta1, 0)X with logistic weights at the null-constrained coefficients.
double ncp_exact(const DesignMatrix& x, const Eigen::VectorXd& beta,
                 Family family, double sigma2);

// Asymptotic Schur-complement form: c2' [P22 - P21 P11^-1 P12] c2 / sigma2
// with c2 = beta2 * sqrt(n). Logistic cases plug sigma2 = 4.
double ncp_asymptotic(const Eigen::MatrixXd& p_matrix,
                      const std::vector<int>& tested_columns,
                      const Eigen::VectorXd& c2, double sigma2);

// Non-centrality of a possibly misspecified sub-model test (Additive under
// a genotypic truth; M1-M4 under the saturated X truth) computed through
// the orthogonal reparametrization of the full model: the tested
// coefficients become the population least-squares projection of the group
// means onto the fitted design, and the Schur complement is taken in the
// fitted model's moment matrix.
double ncp_misspecified(const EffectSpec& effects, const PopulationSpec& pop,
                        const ModelSpec& fitted, int n);

// Effective additive effect a + (w_rr - w_RR) d with homozygote-frequency
// weights w proportional to (1-f)^2 and f^2.
double effective_additive(double a, double d, double f);

struct GroupMeanBeta {
  Eigen::VectorXd beta;
  bool exact = true;  // false when the model cannot reproduce the means and
                      // a population-weighted projection was returned
};

// Coefficients reproducing the group means under the model's coding; exact
// square solve for saturated models, population-weighted least squares
// otherwise.
GroupMeanBeta beta_from_group_means(const EffectSpec& effects,
                                    const PopulationSpec& pop,
                                    const ModelSpec& spec);

// Power-sweep tables over group-mean scenarios (analytic ncp -> power).
enum class SweepKind { Dominant, Interaction };  // varies mu_rR or mu_R

struct XPowerSweepRow {
  double value = 0.0;
  double m1_xci = 0.0, m1_noxci = 0.0;
  double m2_xci = 0.0, m2_noxci = 0.0;
  double m3 = 0.0, m4 = 0.0;
};

std::vector<XPowerSweepRow> xchr_power_sweep(SweepKind kind,
                                             const EffectSpec& base,
                                             const PopulationSpec& pop, int n,
                                             double alpha, double lo, double hi,
                                             double step);

struct AutosomePowerSweepRow {
  double beta_d = 0.0;
  double ncp_additive = 0.0, ncp_genotypic = 0.0;
  double power_additive = 0.0, power_genotypic = 0.0;
};

std::vector<AutosomePowerSweepRow> autosome_power_sweep(
    double beta_a, double f, double sigma2, int n, double alpha, double lo,
    double hi, double step);

void write_xchr_sweep_csv(std::ostream& os,
                          const std::vector<XPowerSweepRow>& rows);
void write_autosome_sweep_csv(std::ostream& os,
                              const std::vector<AutosomePowerSweepRow>& rows);

}  // namespace xgwas
