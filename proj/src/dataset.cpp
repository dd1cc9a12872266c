#include "xgwas/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace xgwas {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (ss >> field) out.push_back(field);
  return out;
}

struct PhenotypeRow {
  Sex sex;
  double phenotype;
  std::vector<double> covariates;
};

}  // namespace

Dataset load_dataset(const std::string& genotype_path,
                     const std::string& phenotype_path) {
  std::ifstream pheno(phenotype_path);
  if (!pheno) throw std::runtime_error("cannot open phenotype file: " + phenotype_path);
  std::ifstream geno(genotype_path);
  if (!geno) throw std::runtime_error("cannot open genotype file: " + genotype_path);

  // Phenotype rows keyed by sample id.
  std::unordered_map<std::string, PhenotypeRow> rows;
  std::string line;
  size_t n_cov = 0;
  bool first = true;
  while (std::getline(pheno, line)) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (first && fields[0] == "sample_id") { first = false; continue; }
    first = false;
    if (fields.size() < 3)
      throw std::runtime_error("phenotype file: expected sample_id sex phenotype");
    PhenotypeRow row;
    if (fields[1] == "F") row.sex = Sex::Female;
    else if (fields[1] == "M") row.sex = Sex::Male;
    else throw std::runtime_error("phenotype file: sex must be F or M");
    row.phenotype = std::stod(fields[2]);
    for (size_t j = 3; j < fields.size(); ++j)
      row.covariates.push_back(std::stod(fields[j]));
    if (rows.empty()) n_cov = row.covariates.size();
    else if (row.covariates.size() != n_cov)
      throw std::runtime_error("phenotype file: ragged covariate columns");
    if (!rows.emplace(fields[0], std::move(row)).second)
      throw std::runtime_error("phenotype file: duplicate sample id " + fields[0]);
  }
  if (rows.empty()) throw std::runtime_error("phenotype file is empty");

  // Genotype header fixes the sample order.
  if (!std::getline(geno, line))
    throw std::runtime_error("genotype file is empty");
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "snp_id" || header[1] != "chrom")
    throw std::runtime_error("genotype file: header must be snp_id chrom samples...");

  Dataset ds;
  for (size_t j = 2; j < header.size(); ++j) ds.sample_ids.push_back(header[j]);
  const int n = ds.n();
  if (static_cast<size_t>(n) != rows.size())
    throw std::runtime_error("sample-ID mismatch between genotype and phenotype files");

  ds.sexes.resize(n);
  ds.phenotype.resize(n);
  if (n_cov > 0) ds.covariates = Eigen::MatrixXd(n, n_cov);
  bool all_binary = true;
  for (int i = 0; i < n; ++i) {
    const auto it = rows.find(ds.sample_ids[i]);
    if (it == rows.end())
      throw std::runtime_error("sample-ID mismatch between genotype and phenotype files");
    ds.sexes[i] = it->second.sex;
    ds.phenotype(i) = it->second.phenotype;
    if (ds.phenotype(i) != 0.0 && ds.phenotype(i) != 1.0) all_binary = false;
    for (size_t j = 0; j < n_cov; ++j)
      (*ds.covariates)(i, j) = it->second.covariates[j];
  }
  ds.binary_phenotype = all_binary;

  std::unordered_set<std::string> seen_snps;
  while (std::getline(geno, line)) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != static_cast<size_t>(n) + 2)
      throw std::runtime_error("genotype file: wrong field count for SNP " +
                               (fields.empty() ? "?" : fields[0]));
    SnpRecord snp;
    snp.id = fields[0];
    if (!seen_snps.insert(snp.id).second)
      throw std::runtime_error("duplicated SNP ID: " + snp.id);
    if (fields[1] == "A") snp.chromosome = ChromosomeKind::Autosome;
    else if (fields[1] == "X") snp.chromosome = ChromosomeKind::XChromosome;
    else throw std::runtime_error("genotype file: chrom must be A or X");

    snp.genotypes.resize(n);
    for (int i = 0; i < n; ++i) {
      const std::string& sym = fields[i + 2];
      const bool x_male = snp.chromosome == ChromosomeKind::XChromosome &&
                          ds.sexes[i] == Sex::Male;
      GenotypeValue v;
      if (sym == "0") v = x_male ? GenotypeValue::HemiRef : GenotypeValue::HomRef;
      else if (sym == "1") v = x_male ? GenotypeValue::HemiAlt : GenotypeValue::Het;
      else if (sym == "2") {
        if (x_male)
          throw std::runtime_error("sex/genotype conflict for SNP " + snp.id +
                                   ", sample " + ds.sample_ids[i]);
        v = GenotypeValue::HomAlt;
      } else {
        // NA and anything else outside the alphabet.
        v = GenotypeValue::Missing;
        if (sym != "NA") ++ds.unknown_symbol_count;
      }
      snp.genotypes[i] = {v, snp.chromosome};
    }
    ds.snps.push_back(std::move(snp));
  }
  if (ds.snps.empty()) throw std::runtime_error("genotype file has no SNP rows");
  return ds;
}

}  // namespace xgwas
