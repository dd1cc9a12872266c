#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "xgwas/types.hpp"

namespace xgwas {

// A dense design matrix with named columns and the index set of the tested
// (trailing genetic) coefficient block. Rows never correspond to missing
// genotypes; callers filter incomplete cases first (see complete_cases).
struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> column_labels;
  std::vector<int> tested_columns;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }
  int q() const { return static_cast<int>(tested_columns.size()); }
};

// Additive covariate for one sample. Autosome genotypes ignore the XCI
// assumption and code 0/1/2 copies of the risk allele; X genotypes follow
// the four (risk, XCI) schemes, with female codes halved under XCI and male
// codes always 0/1.
double code_additive(Genotype g, Sex s, const CodingScheme& scheme);

// Heterozygote indicator; identical across schemes.
double code_dominant(Genotype g);

// Gene-sex interaction, code_additive * sex indicator.
double code_interaction(Genotype g, Sex s, const CodingScheme& scheme);

// Columns in order (1, S, G_A, G_D, GS, E...), with absent terms omitted
// per the model. Throws on length mismatch, missing genotypes, genotypes
// on the wrong chromosome kind, or a constant additive column.
DesignMatrix build_design(std::span<const Genotype> genotypes,
                          std::span<const Sex> sexes,
                          const std::optional<Eigen::MatrixXd>& extra,
                          const ModelSpec& spec);

// Design with the centered/orthogonalized codings used for asymptotic
// non-centrality work: G_A* = (-1,0,1,-1,1), G_D* and GS* frequency-weighted,
// S* = +/-1. Column set matches the model of `spec`.
DesignMatrix reparametrized_design(std::span<const Genotype> genotypes,
                                   std::span<const Sex> sexes, double f_female,
                                   double f_male, const ModelSpec& spec);

// Autosome model (1, S, G_A, GS) in which the counted allele may differ
// between the sexes; testing the (G_A, GS) block is invariant to that
// choice. Used by the invariance audit.
DesignMatrix build_autosome_gs_design(std::span<const Genotype> genotypes,
                                      std::span<const Sex> sexes,
                                      RiskAllele female_risk,
                                      RiskAllele male_risk);

// Indices of samples with an observed genotype, for complete-case filtering
// before design construction. Throws if every genotype is missing.
std::vector<int> complete_cases(std::span<const Genotype> genotypes);

}  // namespace xgwas
