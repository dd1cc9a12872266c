#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "xgwas/coding.hpp"

using namespace xgwas;

namespace {

constexpr auto kX = ChromosomeKind::XChromosome;
constexpr auto kA = ChromosomeKind::Autosome;

Genotype gx(GenotypeValue v) { return {v, kX}; }
Genotype ga(GenotypeValue v) { return {v, kA}; }

// The five X genotype-sex states in (rr, rR, RR, r, R) order.
const std::vector<Genotype> kXStates = {
    gx(GenotypeValue::HomRef), gx(GenotypeValue::Het),
    gx(GenotypeValue::HomAlt), gx(GenotypeValue::HemiRef),
    gx(GenotypeValue::HemiAlt)};
const std::vector<Sex> kXSexes = {Sex::Female, Sex::Female, Sex::Female,
                                  Sex::Male, Sex::Male};

constexpr CodingScheme kRI{RiskAllele::Alt, XciStatus::Inactivated};
constexpr CodingScheme krI{RiskAllele::Ref, XciStatus::Inactivated};
constexpr CodingScheme kRN{RiskAllele::Alt, XciStatus::NotInactivated};
constexpr CodingScheme krN{RiskAllele::Ref, XciStatus::NotInactivated};

std::vector<double> additive_row(const CodingScheme& s) {
  std::vector<double> out;
  for (size_t i = 0; i < kXStates.size(); ++i)
    out.push_back(code_additive(kXStates[i], kXSexes[i], s));
  return out;
}

}  // namespace

TEST_CASE("additive coding matches the four X schemes") {
  CHECK(additive_row(kRI) == std::vector<double>{0, 0.5, 1, 0, 1});
  CHECK(additive_row(krI) == std::vector<double>{1, 0.5, 0, 1, 0});
  CHECK(additive_row(kRN) == std::vector<double>{0, 1, 2, 0, 1});
  CHECK(additive_row(krN) == std::vector<double>{2, 1, 0, 1, 0});
}

TEST_CASE("additive coding spot values") {
  CHECK(code_additive(gx(GenotypeValue::Het), Sex::Female, kRI) == 0.5);
  CHECK(code_additive(gx(GenotypeValue::HemiAlt), Sex::Male, krN) == 0.0);
  CHECK(code_additive(gx(GenotypeValue::HomRef), Sex::Female, krI) == 1.0);
}

TEST_CASE("autosome coding counts the risk allele, XCI ignored") {
  for (auto xci : {XciStatus::Inactivated, XciStatus::NotInactivated}) {
    const CodingScheme alt{RiskAllele::Alt, xci};
    const CodingScheme ref{RiskAllele::Ref, xci};
    CHECK(code_additive(ga(GenotypeValue::HomRef), Sex::Female, alt) == 0.0);
    CHECK(code_additive(ga(GenotypeValue::Het), Sex::Male, alt) == 1.0);
    CHECK(code_additive(ga(GenotypeValue::HomAlt), Sex::Female, alt) == 2.0);
    CHECK(code_additive(ga(GenotypeValue::HomRef), Sex::Male, ref) == 2.0);
    CHECK(code_additive(ga(GenotypeValue::HomAlt), Sex::Female, ref) == 0.0);
  }
}

TEST_CASE("female heterozygote sits at the homozygote midpoint") {
  for (const auto& s : kAllSchemes) {
    const double lo = code_additive(gx(GenotypeValue::HomRef), Sex::Female, s);
    const double het = code_additive(gx(GenotypeValue::Het), Sex::Female, s);
    const double hi = code_additive(gx(GenotypeValue::HomAlt), Sex::Female, s);
    CHECK(het == 0.5 * (lo + hi));
  }
}

TEST_CASE("dominant coding is the het indicator, scheme-free") {
  CHECK(code_dominant(gx(GenotypeValue::Het)) == 1.0);
  CHECK(code_dominant(gx(GenotypeValue::HemiAlt)) == 0.0);
  CHECK(code_dominant(gx(GenotypeValue::HomAlt)) == 0.0);
  CHECK(code_dominant(ga(GenotypeValue::Het)) == 1.0);
}

TEST_CASE("interaction coding") {
  CHECK(code_interaction(gx(GenotypeValue::HemiAlt), Sex::Male, kRI) == 1.0);
  CHECK(code_interaction(gx(GenotypeValue::HemiAlt), Sex::Male, kRN) == 1.0);
  for (const auto& s : kAllSchemes)
    CHECK(code_interaction(gx(GenotypeValue::Het), Sex::Female, s) == 0.0);
  CHECK(code_interaction(gx(GenotypeValue::HemiRef), Sex::Male, krI) == 1.0);
  CHECK(code_interaction(gx(GenotypeValue::HemiRef), Sex::Male, krN) == 1.0);
}

TEST_CASE("coding rejects invalid states") {
  CHECK_THROWS_WITH(code_additive(gx(GenotypeValue::Missing), Sex::Female, kRI),
                    Catch::Matchers::ContainsSubstring("missing genotype"));
  CHECK_THROWS_WITH(code_dominant(gx(GenotypeValue::Missing)),
                    Catch::Matchers::ContainsSubstring("missing genotype"));
  // Male three-state code on X.
  CHECK_THROWS_WITH(code_additive(gx(GenotypeValue::Het), Sex::Male, kRI),
                    Catch::Matchers::ContainsSubstring("invalid male genotype"));
  CHECK_THROWS(code_additive(gx(GenotypeValue::HemiAlt), Sex::Female, kRI));
  CHECK_THROWS(code_additive(ga(GenotypeValue::HemiRef), Sex::Male, kRI));
}

TEST_CASE("M1 design reproduces the displayed XCI matrix") {
  const ModelSpec spec{ModelId::M1, Family::Linear, kRI, 0};
  const DesignMatrix x = build_design(kXStates, kXSexes, std::nullopt, spec);
  Eigen::MatrixXd expect(5, 3);
  expect << 1, 0, 0,
            1, 0, 0.5,
            1, 0, 1,
            1, 1, 0,
            1, 1, 1;
  CHECK((x.values - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(x.column_labels == std::vector<std::string>{"intercept", "S", "G_A"});
  CHECK(x.tested_columns == std::vector<int>{2});
}

TEST_CASE("M4 design with reference risk allele, no XCI") {
  const ModelSpec spec{ModelId::M4, Family::Linear, krN, 0};
  const DesignMatrix x = build_design(kXStates, kXSexes, std::nullopt, spec);
  Eigen::MatrixXd expect(5, 5);  // columns 1, S, G_A, G_D, GS
  expect << 1, 0, 2, 0, 0,
            1, 0, 1, 1, 0,
            1, 0, 0, 0, 0,
            1, 1, 1, 0, 1,
            1, 1, 0, 0, 0;
  CHECK((x.values - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(x.tested_columns == std::vector<int>{2, 3, 4});
}

TEST_CASE("M0 design has two columns") {
  const ModelSpec spec{ModelId::M0, Family::Linear, kRI, 0};
  const DesignMatrix x = build_design(kXStates, kXSexes, std::nullopt, spec);
  CHECK(x.p() == 2);
  CHECK(x.column_labels == std::vector<std::string>{"intercept", "G_A"});
  CHECK(x.tested_columns == std::vector<int>{1});
}

TEST_CASE("dominant and sex columns identical across schemes") {
  for (ModelId m : {ModelId::M2, ModelId::M4}) {
    std::vector<Eigen::VectorXd> s_cols, d_cols;
    for (const auto& scheme : kAllSchemes) {
      const ModelSpec spec{m, Family::Linear, scheme, 0};
      const DesignMatrix x = build_design(kXStates, kXSexes, std::nullopt, spec);
      s_cols.push_back(x.values.col(1));
      d_cols.push_back(x.values.col(3));
    }
    for (size_t i = 1; i < s_cols.size(); ++i) {
      CHECK(s_cols[i] == s_cols[0]);
      CHECK(d_cols[i] == d_cols[0]);
    }
  }
}

TEST_CASE("design construction errors") {
  const ModelSpec m1{ModelId::M1, Family::Linear, kRI, 0};
  std::vector<Sex> short_sexes = {Sex::Female};
  CHECK_THROWS(build_design(kXStates, short_sexes, std::nullopt, m1));

  // Monomorphic SNP.
  std::vector<Genotype> mono(6, gx(GenotypeValue::HomRef));
  std::vector<Sex> females(6, Sex::Female);
  CHECK_THROWS_WITH(build_design(mono, females, std::nullopt, m1),
                    Catch::Matchers::ContainsSubstring("degenerate SNP"));

  // Autosome data under an X model and vice versa.
  std::vector<Genotype> autos = {ga(GenotypeValue::HomRef), ga(GenotypeValue::Het)};
  std::vector<Sex> two(2, Sex::Female);
  CHECK_THROWS(build_design(autos, two, std::nullopt, m1));
  const ModelSpec add{ModelId::Additive, Family::Linear, kRN, 0};
  CHECK_THROWS(build_design(kXStates, kXSexes, std::nullopt, add));
}

TEST_CASE("extra covariates are appended unchanged") {
  Eigen::MatrixXd extra(5, 2);
  extra << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  const ModelSpec spec{ModelId::M3, Family::Linear, kRN, 2};
  const DesignMatrix x = build_design(kXStates, kXSexes, extra, spec);
  CHECK(x.p() == 6);
  CHECK(x.values.rightCols(2) == extra);
  CHECK(x.tested_columns == std::vector<int>{2, 3});
  CHECK(x.column_labels.back() == "E2");
}

TEST_CASE("reparametrized codings match the frequency-weighted forms") {
  const ModelSpec m4{ModelId::M4, Family::Linear, kRN, 0};
  const DesignMatrix x =
      reparametrized_design(kXStates, kXSexes, 0.2, 0.5, m4);
  // Columns 1, S*, G_A*, G_D*, GS*.
  Eigen::VectorXd s_star(5), a_star(5), d_star(5), gs_star(5);
  s_star << -1, -1, -1, 1, 1;
  a_star << -1, 0, 1, -1, 1;
  d_star << -2 * 0.04, 2 * 0.2 * 0.8, -2 * 0.64, 0, 0;
  gs_star << -0.2, 0.3, 0.8, 0.16, -0.16;
  CHECK((x.values.col(1) - s_star).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((x.values.col(2) - a_star).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((x.values.col(3) - d_star).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((x.values.col(4) - gs_star).cwiseAbs().maxCoeff() < 1e-15);

  // Autosome dominant coding at f = 0.5.
  std::vector<Genotype> autos = {ga(GenotypeValue::HomRef),
                                 ga(GenotypeValue::Het),
                                 ga(GenotypeValue::HomAlt)};
  std::vector<Sex> three(3, Sex::Female);
  const ModelSpec gen{ModelId::Genotypic, Family::Linear, kRN, 0};
  const DesignMatrix xa = reparametrized_design(autos, three, 0.5, 0.5, gen);
  Eigen::VectorXd gd(3);
  gd << -0.5, 0.5, -0.5;
  CHECK((xa.values.col(2) - gd).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS(reparametrized_design(kXStates, kXSexes, 0.0, 0.5, m4));
  CHECK_THROWS(reparametrized_design(kXStates, kXSexes, 0.2, 1.0, m4));
}

TEST_CASE("reparametrized columns are empirically orthogonal under HWE") {
  // Hand-rolled HWE sampler, independent of the library's simulator.
  std::mt19937_64 rng(77123);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double f = 0.3;
  const int n = 200000;
  std::vector<Genotype> genotypes;
  std::vector<Sex> sexes;
  for (int i = 0; i < n; ++i) {
    const bool male = unif(rng) < 0.5;
    sexes.push_back(male ? Sex::Male : Sex::Female);
    GenotypeValue v;
    if (male) {
      v = unif(rng) < f ? GenotypeValue::HemiAlt : GenotypeValue::HemiRef;
    } else {
      const double u = unif(rng);
      v = u < (1 - f) * (1 - f) ? GenotypeValue::HomRef
          : u < (1 - f) * (1 - f) + 2 * f * (1 - f) ? GenotypeValue::Het
                                                    : GenotypeValue::HomAlt;
    }
    genotypes.push_back(gx(v));
  }
  const ModelSpec m4{ModelId::M4, Family::Linear, kRN, 0};
  const DesignMatrix x = reparametrized_design(genotypes, sexes, f, f, m4);

  auto corr = [&](int i, int j) {
    const auto a = x.values.col(i).array();
    const auto b = x.values.col(j).array();
    const double ma = a.mean(), mb = b.mean();
    const double cov = ((a - ma) * (b - mb)).mean();
    return cov / std::sqrt((a - ma).square().mean() * (b - mb).square().mean());
  };
  const double bound = 3.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(corr(2, 3)) < bound);  // G_A*, G_D*
  CHECK(std::abs(corr(2, 4)) < bound);  // G_A*, GS*
  CHECK(std::abs(corr(3, 4)) < bound);  // G_D*, GS*
}

TEST_CASE("complete case filter") {
  std::vector<Genotype> g = {gx(GenotypeValue::HomRef), gx(GenotypeValue::Missing),
                             gx(GenotypeValue::HemiAlt)};
  CHECK(complete_cases(g) == std::vector<int>{0, 2});
  std::vector<Genotype> all_missing(3, gx(GenotypeValue::Missing));
  CHECK_THROWS(complete_cases(all_missing));
}

TEST_CASE("autosome gene-sex design supports per-sex baseline alleles") {
  // Female rr/rR/RR then male rr/rR/RR.
  std::vector<Genotype> g = {ga(GenotypeValue::HomRef), ga(GenotypeValue::Het),
                             ga(GenotypeValue::HomAlt), ga(GenotypeValue::HomRef),
                             ga(GenotypeValue::Het), ga(GenotypeValue::HomAlt)};
  std::vector<Sex> s = {Sex::Female, Sex::Female, Sex::Female,
                        Sex::Male, Sex::Male, Sex::Male};
  const DesignMatrix same =
      build_autosome_gs_design(g, s, RiskAllele::Alt, RiskAllele::Alt);
  const DesignMatrix flipped =
      build_autosome_gs_design(g, s, RiskAllele::Alt, RiskAllele::Ref);
  Eigen::MatrixXd e1(6, 4), e2(6, 4);
  e1 << 1, 0, 0, 0,
        1, 0, 1, 0,
        1, 0, 2, 0,
        1, 1, 0, 0,
        1, 1, 1, 1,
        1, 1, 2, 2;
  e2 << 1, 0, 0, 0,
        1, 0, 1, 0,
        1, 0, 2, 0,
        1, 1, 2, 2,
        1, 1, 1, 1,
        1, 1, 0, 0;
  CHECK((same.values - e1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((flipped.values - e2).cwiseAbs().maxCoeff() == 0.0);
}
