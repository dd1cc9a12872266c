#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "xgwas/types.hpp"

namespace xgwas {

struct SnpRecord {
  std::string id;
  ChromosomeKind chromosome = ChromosomeKind::Autosome;
  std::vector<Genotype> genotypes;  // aligned with Dataset sample order
};

struct Dataset {
  std::vector<std::string> sample_ids;
  std::vector<Sex> sexes;
  Eigen::VectorXd phenotype;
  bool binary_phenotype = false;
  std::optional<Eigen::MatrixXd> covariates;
  std::vector<SnpRecord> snps;
  long unknown_symbol_count = 0;  // symbols outside the alphabet, set missing

  int n() const { return static_cast<int>(sample_ids.size()); }
};

// Genotype file: TSV with header "snp_id chrom sample1 ... sampleN",
// chrom in {A, X}; symbols are alternative-allele counts 0/1/2 for
// females and autosomes, 0/1 for X males, NA for missing. Phenotype file:
// TSV "sample_id sex phenotype [covariates...]" with sex in {F, M}.
// Samples are aligned by ID; mismatched ID sets, duplicate SNP ids, empty
// files and sex/genotype conflicts are hard errors; unknown genotype
// symbols become Missing and are counted.
Dataset load_dataset(const std::string& genotype_path,
                     const std::string& phenotype_path);

}  // namespace xgwas
