#include "xgwas/coding.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace xgwas {

std::string model_name(ModelId m) {
  switch (m) {
    case ModelId::Additive: return "additive";
    case ModelId::Genotypic: return "genotypic";
    case ModelId::M0: return "M0";
    case ModelId::M1: return "M1";
    case ModelId::M2: return "M2";
    case ModelId::M3: return "M3";
    case ModelId::M4: return "M4";
  }
  return "?";
}

std::string scheme_name(const CodingScheme& s) {
  std::string out = s.risk == RiskAllele::Alt ? "R" : "r";
  out += s.xci == XciStatus::Inactivated ? ",xci" : ",noxci";
  return out;
}

namespace {

// Copies of the alternative allele carried by the genotype.
int alt_count(GenotypeValue v) {
  switch (v) {
    case GenotypeValue::HomRef: return 0;
    case GenotypeValue::Het: return 1;
    case GenotypeValue::HomAlt: return 2;
    case GenotypeValue::HemiRef: return 0;
    case GenotypeValue::HemiAlt: return 1;
    case GenotypeValue::Missing: break;
  }
  throw std::invalid_argument("missing genotype");
}

void check_state(Genotype g, Sex s) {
  if (g.missing()) throw std::invalid_argument("missing genotype");
  if (g.chromosome == ChromosomeKind::XChromosome) {
    if (s == Sex::Male && !g.hemizygous())
      throw std::invalid_argument("invalid male genotype");
    if (s == Sex::Female && g.hemizygous())
      throw std::invalid_argument("invalid female genotype");
  } else if (g.hemizygous()) {
    throw std::invalid_argument("hemizygous genotype on autosome");
  }
}

}  // namespace

double code_additive(Genotype g, Sex s, const CodingScheme& scheme) {
  check_state(g, s);
  const int copies = g.chromosome == ChromosomeKind::Autosome
                         ? 2
                         : (s == Sex::Male ? 1 : 2);
  int count = alt_count(g.value);
  if (scheme.risk == RiskAllele::Ref) count = copies - count;
  if (g.chromosome == ChromosomeKind::Autosome) return count;
  // Females halve under XCI; male codes are 0/1 under either assumption.
  if (s == Sex::Female && scheme.xci == XciStatus::Inactivated)
    return 0.5 * count;
  return count;
}

double code_dominant(Genotype g) {
  if (g.missing()) throw std::invalid_argument("missing genotype");
  return g.value == GenotypeValue::Het ? 1.0 : 0.0;
}

double code_interaction(Genotype g, Sex s, const CodingScheme& scheme) {
  return code_additive(g, s, scheme) * (s == Sex::Male ? 1.0 : 0.0);
}

std::vector<int> complete_cases(std::span<const Genotype> genotypes) {
  std::vector<int> kept;
  kept.reserve(genotypes.size());
  for (int i = 0; i < static_cast<int>(genotypes.size()); ++i)
    if (!genotypes[i].missing()) kept.push_back(i);
  if (kept.empty()) throw std::runtime_error("all genotypes missing");
  return kept;
}

namespace {

DesignMatrix assemble(std::span<const Genotype> genotypes,
                      std::span<const Sex> sexes,
                      const std::optional<Eigen::MatrixXd>& extra,
                      const ModelSpec& spec,
                      const std::vector<std::string>& gen_labels,
                      const std::function<void(int, double*)>& fill_genetic) {
  const auto n = static_cast<Eigen::Index>(genotypes.size());
  if (n != static_cast<Eigen::Index>(sexes.size()))
    throw std::invalid_argument("genotype/sex length mismatch");
  if (extra && extra->rows() != n)
    throw std::invalid_argument("covariate length mismatch");
  const int n_extra = extra ? static_cast<int>(extra->cols()) : 0;

  const bool with_sex = model_has_sex(spec.model);
  const int n_gen = tested_df(spec.model);
  const int p = 1 + (with_sex ? 1 : 0) + n_gen + n_extra;

  DesignMatrix out;
  out.values.resize(n, p);
  out.values.col(0).setOnes();
  out.column_labels.push_back("intercept");
  int col = 1;
  if (with_sex) {
    for (Eigen::Index i = 0; i < n; ++i)
      out.values(i, col) = sexes[i] == Sex::Male ? 1.0 : 0.0;
    out.column_labels.push_back("S");
    ++col;
  }
  std::vector<double> buf(n_gen);
  for (Eigen::Index i = 0; i < n; ++i) {
    fill_genetic(static_cast<int>(i), buf.data());
    for (int j = 0; j < n_gen; ++j) out.values(i, col + j) = buf[j];
  }
  for (const auto& lab : gen_labels) out.column_labels.push_back(lab);
  for (int j = 0; j < n_gen; ++j) out.tested_columns.push_back(col + j);
  col += n_gen;
  if (extra) {
    out.values.rightCols(n_extra) = *extra;
    for (int j = 0; j < n_extra; ++j)
      out.column_labels.push_back("E" + std::to_string(j + 1));
  }

  const auto g_a = out.values.col(out.tested_columns.front());
  if ((g_a.array() - g_a(0)).abs().maxCoeff() == 0.0)
    throw std::runtime_error("degenerate SNP");
  return out;
}

std::vector<std::string> genetic_labels(ModelId m) {
  std::vector<std::string> labels = {"G_A"};
  if (model_has_dominant(m)) labels.push_back("G_D");
  if (model_has_interaction(m)) labels.push_back("GS");
  return labels;
}

}  // namespace

DesignMatrix build_design(std::span<const Genotype> genotypes,
                          std::span<const Sex> sexes,
                          const std::optional<Eigen::MatrixXd>& extra,
                          const ModelSpec& spec) {
  const auto expected = is_autosome_model(spec.model)
                            ? ChromosomeKind::Autosome
                            : ChromosomeKind::XChromosome;
  for (const auto& g : genotypes)
    if (g.chromosome != expected)
      throw std::invalid_argument("genotype chromosome does not match model");

  return assemble(genotypes, sexes, extra, spec, genetic_labels(spec.model),
                  [&](int i, double* row) {
                    int j = 0;
                    row[j++] = code_additive(genotypes[i], sexes[i], spec.scheme);
                    if (model_has_dominant(spec.model))
                      row[j++] = code_dominant(genotypes[i]);
                    if (model_has_interaction(spec.model))
                      row[j++] =
                          code_interaction(genotypes[i], sexes[i], spec.scheme);
                  });
}

// Starred codings: G_A* = (-1,0,1) per genotype (both sexes on X),
// G_D* = (-2f^2, 2f(1-f), -2(1-f)^2) for females / 0 for males,
// GS* frequency-weighted so that it is population-orthogonal to G_A* and
// G_D* at equal sex proportions, S* = -1/+1.
DesignMatrix reparametrized_design(std::span<const Genotype> genotypes,
                                   std::span<const Sex> sexes, double f_female,
                                   double f_male, const ModelSpec& spec) {
  if (!(f_female > 0.0 && f_female < 1.0 && f_male > 0.0 && f_male < 1.0))
    throw std::invalid_argument("allele frequency out of (0,1)");
  const double ff = f_female;

  auto star_additive = [](Genotype g) {
    switch (g.value) {
      case GenotypeValue::HomRef: return -1.0;
      case GenotypeValue::Het: return 0.0;
      case GenotypeValue::HomAlt: return 1.0;
      case GenotypeValue::HemiRef: return -1.0;
      case GenotypeValue::HemiAlt: return 1.0;
      case GenotypeValue::Missing: break;
    }
    throw std::invalid_argument("missing genotype");
  };
  auto star_dominant = [ff](Genotype g) {
    switch (g.value) {
      case GenotypeValue::HomRef: return -2.0 * ff * ff;
      case GenotypeValue::Het: return 2.0 * ff * (1.0 - ff);
      case GenotypeValue::HomAlt: return -2.0 * (1.0 - ff) * (1.0 - ff);
      default: return 0.0;
    }
  };
  auto star_interaction = [ff, f_male](Genotype g) {
    switch (g.value) {
      case GenotypeValue::HomRef: return -ff;
      case GenotypeValue::Het: return 0.5 - ff;
      case GenotypeValue::HomAlt: return 1.0 - ff;
      case GenotypeValue::HemiRef:
        return ff * (1.0 - ff) / (2.0 * (1.0 - f_male));
      case GenotypeValue::HemiAlt: return -ff * (1.0 - ff) / (2.0 * f_male);
      case GenotypeValue::Missing: break;
    }
    throw std::invalid_argument("missing genotype");
  };

  const auto n = static_cast<Eigen::Index>(genotypes.size());
  if (n != static_cast<Eigen::Index>(sexes.size()))
    throw std::invalid_argument("genotype/sex length mismatch");

  const bool with_sex = model_has_sex(spec.model);
  const int n_gen = tested_df(spec.model);
  DesignMatrix out;
  out.values.resize(n, 1 + (with_sex ? 1 : 0) + n_gen);
  out.values.col(0).setOnes();
  out.column_labels.push_back("intercept");
  int col = 1;
  if (with_sex) {
    for (Eigen::Index i = 0; i < n; ++i)
      out.values(i, col) = sexes[i] == Sex::Male ? 1.0 : -1.0;
    out.column_labels.push_back("S*");
    ++col;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    check_state(genotypes[i], sexes[i]);
    int j = col;
    out.values(i, j++) = star_additive(genotypes[i]);
    if (model_has_dominant(spec.model))
      out.values(i, j++) = star_dominant(genotypes[i]);
    if (model_has_interaction(spec.model))
      out.values(i, j++) = star_interaction(genotypes[i]);
  }
  out.column_labels.push_back("G_A*");
  if (model_has_dominant(spec.model)) out.column_labels.push_back("G_D*");
  if (model_has_interaction(spec.model)) out.column_labels.push_back("GS*");
  for (int j = 0; j < n_gen; ++j) out.tested_columns.push_back(col + j);
  return out;
}

DesignMatrix build_autosome_gs_design(std::span<const Genotype> genotypes,
                                      std::span<const Sex> sexes,
                                      RiskAllele female_risk,
                                      RiskAllele male_risk) {
  const auto n = static_cast<Eigen::Index>(genotypes.size());
  if (n != static_cast<Eigen::Index>(sexes.size()))
    throw std::invalid_argument("genotype/sex length mismatch");
  DesignMatrix out;
  out.values.resize(n, 4);
  out.column_labels = {"intercept", "S", "G_A", "GS"};
  out.tested_columns = {2, 3};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (genotypes[i].chromosome != ChromosomeKind::Autosome)
      throw std::invalid_argument("genotype chromosome does not match model");
    const bool male = sexes[i] == Sex::Male;
    const CodingScheme scheme{male ? male_risk : female_risk,
                              XciStatus::NotInactivated};
    const double g = code_additive(genotypes[i], sexes[i], scheme);
    out.values(i, 0) = 1.0;
    out.values(i, 1) = male ? 1.0 : 0.0;
    out.values(i, 2) = g;
    out.values(i, 3) = male ? g : 0.0;
  }
  return out;
}

}  // namespace xgwas
