#include "xgwas/ncp.hpp"

#include <cmath>
#include <stdexcept>

#include "xgwas/power.hpp"

namespace xgwas {

void PopulationSpec::validate() const {
  if (!(f_female > 0.0 && f_female < 1.0 && f_male > 0.0 && f_male < 1.0))
    throw std::invalid_argument("allele frequency out of (0,1)");
  if (!(sex_ratio > 0.0 && sex_ratio < 1.0))
    throw std::invalid_argument("sex_ratio out of (0,1)");
}

std::vector<PopulationState> enumerate_states(const PopulationSpec& pop,
                                              const EffectSpec& effects,
                                              ChromosomeKind kind) {
  pop.validate();
  const double rho = pop.sex_ratio;
  std::vector<PopulationState> states;

  auto female_genotype_probs = [&](double f) {
    return std::array<double, 3>{(1.0 - f) * (1.0 - f), 2.0 * f * (1.0 - f),
                                 f * f};
  };

  if (kind == ChromosomeKind::XChromosome) {
    const auto pf = female_genotype_probs(pop.f_female);
    states.push_back({{GenotypeValue::HomRef, kind}, Sex::Female,
                      (1.0 - rho) * pf[0], effects.mu_rr});
    states.push_back({{GenotypeValue::Het, kind}, Sex::Female,
                      (1.0 - rho) * pf[1], effects.mu_rR});
    states.push_back({{GenotypeValue::HomAlt, kind}, Sex::Female,
                      (1.0 - rho) * pf[2], effects.mu_RR});
    states.push_back({{GenotypeValue::HemiRef, kind}, Sex::Male,
                      rho * (1.0 - pop.f_male), effects.mu_r});
    states.push_back({{GenotypeValue::HemiAlt, kind}, Sex::Male,
                      rho * pop.f_male, effects.mu_R});
    return states;
  }

  // Autosome: both sexes carry the three diploid genotypes; male frequencies
  // may differ from female ones.
  const auto pf = female_genotype_probs(pop.f_female);
  const auto pm = female_genotype_probs(pop.f_male);
  const std::array<GenotypeValue, 3> values = {
      GenotypeValue::HomRef, GenotypeValue::Het, GenotypeValue::HomAlt};
  const std::array<double, 3> means = {effects.mu_rr, effects.mu_rR,
                                       effects.mu_RR};
  for (int i = 0; i < 3; ++i)
    states.push_back(
        {{values[i], kind}, Sex::Female, (1.0 - rho) * pf[i], means[i]});
  for (int i = 0; i < 3; ++i)
    states.push_back(
        {{values[i], kind}, Sex::Male, rho * pm[i], means[i]});
  return states;
}

namespace {

// Design rows for the population states under the model's coding; one row
// per state, in enumerate_states order.
Eigen::MatrixXd state_rows(const std::vector<PopulationState>& states,
                           const ModelSpec& spec, bool reparametrized,
                           const PopulationSpec& pop) {
  const int n_states = static_cast<int>(states.size());
  std::vector<Genotype> genotypes(n_states);
  std::vector<Sex> sexes(n_states);
  for (int i = 0; i < n_states; ++i) {
    genotypes[i] = states[i].genotype;
    sexes[i] = states[i].sex;
  }
  if (reparametrized)
    return reparametrized_design(genotypes, sexes, pop.f_female, pop.f_male,
                                 spec)
        .values;
  // build_design rejects constant additive columns; state rows are always
  // polymorphic by construction, so assemble directly via the coders.
  const bool with_sex = model_has_sex(spec.model);
  const int p = 1 + (with_sex ? 1 : 0) + tested_df(spec.model);
  Eigen::MatrixXd rows(n_states, p);
  for (int i = 0; i < n_states; ++i) {
    int j = 0;
    rows(i, j++) = 1.0;
    if (with_sex) rows(i, j++) = sexes[i] == Sex::Male ? 1.0 : 0.0;
    rows(i, j++) = code_additive(genotypes[i], sexes[i], spec.scheme);
    if (model_has_dominant(spec.model)) rows(i, j++) = code_dominant(genotypes[i]);
    if (model_has_interaction(spec.model))
      rows(i, j++) = code_interaction(genotypes[i], sexes[i], spec.scheme);
  }
  return rows;
}

std::vector<int> model_tested_columns(const ModelSpec& spec) {
  const int first = 1 + (model_has_sex(spec.model) ? 1 : 0);
  std::vector<int> tested;
  for (int j = 0; j < tested_df(spec.model); ++j) tested.push_back(first + j);
  return tested;
}

Eigen::MatrixXd moments_from_rows(const Eigen::MatrixXd& rows,
                                  const std::vector<PopulationState>& states) {
  Eigen::VectorXd probs(rows.rows());
  for (int i = 0; i < rows.rows(); ++i) probs(i) = states[i].prob;
  return rows.transpose() * probs.asDiagonal() * rows;
}

Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& m,
                                 const std::vector<int>& tested) {
  const auto p = m.rows();
  std::vector<char> is_tested(p, 0);
  for (int j : tested) is_tested.at(j) = 1;
  std::vector<int> nuisance;
  for (int j = 0; j < p; ++j)
    if (!is_tested[j]) nuisance.push_back(j);

  const int q = static_cast<int>(tested.size());
  const int r = static_cast<int>(nuisance.size());
  Eigen::MatrixXd m22(q, q), m11(r, r), m12(r, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) m22(i, j) = m(tested[i], tested[j]);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m11(i, j) = m(nuisance[i], nuisance[j]);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < q; ++j) m12(i, j) = m(nuisance[i], tested[j]);
  if (r == 0) return m22;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(m11);
  if (!lu.isInvertible()) throw std::runtime_error("singular nuisance block");
  return m22 - m12.transpose() * lu.solve(m12);
}

}  // namespace

Eigen::MatrixXd moment_matrix(const PopulationSpec& pop,
                              const ModelSpec& spec) {
  const EffectSpec null_effects{};
  const auto kind = is_autosome_model(spec.model) ? ChromosomeKind::Autosome
                                                  : ChromosomeKind::XChromosome;
  const auto states = enumerate_states(pop, null_effects, kind);
  return moments_from_rows(state_rows(states, spec, false, pop), states);
}

Eigen::MatrixXd moment_matrix_reparametrized(const PopulationSpec& pop,
                                             const ModelSpec& spec) {
  const EffectSpec null_effects{};
  const auto kind = is_autosome_model(spec.model) ? ChromosomeKind::Autosome
                                                  : ChromosomeKind::XChromosome;
  const auto states = enumerate_states(pop, null_effects, kind);
  return moments_from_rows(state_rows(states, spec, true, pop), states);
}

double ncp_exact(const DesignMatrix& x, const Eigen::VectorXd& beta,
                 Family family, double sigma2) {
  if (beta.size() != x.p())
    throw std::invalid_argument("ncp_exact: coefficient length mismatch");
  if (x.tested_columns.empty())
    throw std::invalid_argument("ncp_exact: empty tested block");
  if (sigma2 <= 0.0) throw std::invalid_argument("ncp_exact: sigma2 <= 0");

  Eigen::MatrixXd h;
  if (family == Family::Linear) {
    h = x.values.transpose() * x.values / sigma2;
  } else {
    // Weights at the null-constrained coefficient value (beta1, 0).
    Eigen::VectorXd beta_null = beta;
    for (int j : x.tested_columns) beta_null(j) = 0.0;
    const Eigen::VectorXd eta = x.values * beta_null;
    Eigen::VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double m = 1.0 / (1.0 + std::exp(-eta(i)));
      w(i) = m * (1.0 - m);
    }
    h = x.values.transpose() * w.asDiagonal() * x.values;
  }

  const Eigen::MatrixXd s = schur_complement(h, x.tested_columns);
  Eigen::VectorXd b2(x.q());
  for (int i = 0; i < x.q(); ++i) b2(i) = beta(x.tested_columns[i]);
  return b2.dot(s * b2);
}

double ncp_asymptotic(const Eigen::MatrixXd& p_matrix,
                      const std::vector<int>& tested_columns,
                      const Eigen::VectorXd& c2, double sigma2) {
  if (static_cast<int>(tested_columns.size()) != c2.size())
    throw std::invalid_argument("ncp_asymptotic: tested block size mismatch");
  if (sigma2 <= 0.0) throw std::invalid_argument("ncp_asymptotic: sigma2 <= 0");
  const Eigen::MatrixXd s = schur_complement(p_matrix, tested_columns);
  return c2.dot(s * c2) / sigma2;
}

double effective_additive(double a, double d, double f) {
  if (!(f > 0.0 && f < 1.0))
    throw std::invalid_argument("effective_additive: f out of (0,1)");
  const double w_rr = (1.0 - f) * (1.0 - f);
  const double w_RR = f * f;
  return a + (w_rr - w_RR) / (w_rr + w_RR) * d;
}

GroupMeanBeta beta_from_group_means(const EffectSpec& effects,
                                    const PopulationSpec& pop,
                                    const ModelSpec& spec) {
  const auto kind = is_autosome_model(spec.model) ? ChromosomeKind::Autosome
                                                  : ChromosomeKind::XChromosome;
  const auto states = enumerate_states(pop, effects, kind);
  const Eigen::MatrixXd rows = state_rows(states, spec, false, pop);
  Eigen::VectorXd means(rows.rows()), probs(rows.rows());
  for (int i = 0; i < rows.rows(); ++i) {
    means(i) = states[i].mean;
    probs(i) = states[i].prob;
  }

  // Population-weighted least squares; exact when the model saturates the
  // group means.
  const Eigen::ArrayXd sw = probs.array().sqrt();
  const Eigen::MatrixXd a = sw.matrix().asDiagonal() * rows;
  const Eigen::VectorXd b = (sw * means.array()).matrix();
  GroupMeanBeta out;
  out.beta = a.colPivHouseholderQr().solve(b);
  const double residual = (rows * out.beta - means).cwiseAbs().maxCoeff();
  out.exact = residual < 1e-10 * (1.0 + means.cwiseAbs().maxCoeff());
  return out;
}

double ncp_misspecified(const EffectSpec& effects, const PopulationSpec& pop,
                        const ModelSpec& fitted, int n) {
  switch (fitted.model) {
    case ModelId::Additive:
    case ModelId::Genotypic:
    case ModelId::M1:
    case ModelId::M2:
    case ModelId::M3:
    case ModelId::M4:
      break;
    default:
      throw std::invalid_argument("ncp_misspecified: non-nested model pair");
  }
  if (n <= 0) throw std::invalid_argument("ncp_misspecified: n must be positive");

  const auto kind = is_autosome_model(fitted.model)
                        ? ChromosomeKind::Autosome
                        : ChromosomeKind::XChromosome;
  const auto states = enumerate_states(pop, effects, kind);
  const Eigen::MatrixXd rows = state_rows(states, fitted, false, pop);

  Eigen::VectorXd means(rows.rows()), probs(rows.rows());
  for (int i = 0; i < rows.rows(); ++i) {
    means(i) = states[i].mean;
    probs(i) = states[i].prob;
  }

  // Population projection of the group means onto the fitted design. The
  // tested components coincide with the starred coefficients of the
  // orthogonal reparametrization, which is correctly specified, so the
  // asymptotic Schur form applies to them directly.
  const Eigen::MatrixXd p_sub = rows.transpose() * probs.asDiagonal() * rows;
  const Eigen::VectorXd v = rows.transpose() * (probs.asDiagonal() * means);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(p_sub);
  if (!lu.isInvertible())
    throw std::runtime_error("ncp_misspecified: singular moment matrix");
  const Eigen::VectorXd b_limit = lu.solve(v);

  const auto tested = model_tested_columns(fitted);
  Eigen::VectorXd c2(tested.size());
  for (size_t i = 0; i < tested.size(); ++i)
    c2(static_cast<Eigen::Index>(i)) =
        b_limit(tested[i]) * std::sqrt(static_cast<double>(n));
  const double sigma2 =
      effects.family == Family::Logistic ? 4.0 : effects.sigma2;
  return ncp_asymptotic(p_sub, tested, c2, sigma2);
}

std::vector<XPowerSweepRow> xchr_power_sweep(SweepKind kind,
                                             const EffectSpec& base,
                                             const PopulationSpec& pop, int n,
                                             double alpha, double lo, double hi,
                                             double step) {
  std::vector<XPowerSweepRow> rows;
  const CodingScheme xci{RiskAllele::Alt, XciStatus::Inactivated};
  const CodingScheme noxci{RiskAllele::Alt, XciStatus::NotInactivated};

  auto model_power = [&](const EffectSpec& eff, ModelId m,
                         const CodingScheme& s) {
    ModelSpec fitted{m, eff.family, s, 0};
    const double ncp = ncp_misspecified(eff, pop, fitted, n);
    return power(tested_df(m), ncp, alpha);
  };

  for (double v = lo; v <= hi + 1e-12; v += step) {
    EffectSpec eff = base;
    if (kind == SweepKind::Dominant)
      eff.mu_rR = v;
    else
      eff.mu_R = v;
    XPowerSweepRow row;
    row.value = v;
    row.m1_xci = model_power(eff, ModelId::M1, xci);
    row.m1_noxci = model_power(eff, ModelId::M1, noxci);
    row.m2_xci = model_power(eff, ModelId::M2, xci);
    row.m2_noxci = model_power(eff, ModelId::M2, noxci);
    row.m3 = model_power(eff, ModelId::M3, xci);
    row.m4 = model_power(eff, ModelId::M4, xci);
    rows.push_back(row);
  }
  return rows;
}

std::vector<AutosomePowerSweepRow> autosome_power_sweep(
    double beta_a, double f, double sigma2, int n, double alpha, double lo,
    double hi, double step) {
  std::vector<AutosomePowerSweepRow> rows;
  PopulationSpec pop{f, f, 0.5, true};
  for (double d = lo; d <= hi + 1e-12; d += step) {
    EffectSpec eff;
    eff.mu_rr = 0.0;
    eff.mu_rR = beta_a + d;
    eff.mu_RR = 2.0 * beta_a;
    eff.sigma2 = sigma2;
    AutosomePowerSweepRow row;
    row.beta_d = d;
    row.ncp_additive = ncp_misspecified(
        eff, pop, ModelSpec{ModelId::Additive, Family::Linear, {}, 0}, n);
    row.ncp_genotypic = ncp_misspecified(
        eff, pop, ModelSpec{ModelId::Genotypic, Family::Linear, {}, 0}, n);
    row.power_additive = power(1, row.ncp_additive, alpha);
    row.power_genotypic = power(2, row.ncp_genotypic, alpha);
    rows.push_back(row);
  }
  return rows;
}

void write_xchr_sweep_csv(std::ostream& os,
                          const std::vector<XPowerSweepRow>& rows) {
  os << "value,power_m1_xci,power_m1_noxci,power_m2_xci,power_m2_noxci,"
        "power_m3,power_m4\n";
  for (const auto& r : rows)
    os << r.value << ',' << r.m1_xci << ',' << r.m1_noxci << ',' << r.m2_xci
       << ',' << r.m2_noxci << ',' << r.m3 << ',' << r.m4 << '\n';
}

void write_autosome_sweep_csv(std::ostream& os,
                              const std::vector<AutosomePowerSweepRow>& rows) {
  os << "beta_d,ncp_additive,ncp_genotypic,power_additive,power_genotypic\n";
  for (const auto& r : rows)
    os << r.beta_d << ',' << r.ncp_additive << ',' << r.ncp_genotypic << ','
       << r.power_additive << ',' << r.power_genotypic << '\n';
}

}  // namespace xgwas
