#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "xgwas/assoc.hpp"
#include "xgwas/dataset.hpp"
#include "xgwas/simulate.hpp"

namespace xgwas {

struct ScanOptions {
  Family family = Family::Linear;
  std::vector<TestKind> tests = {TestKind::Wald};
  double alpha = 5e-8;
  int threads = 1;
  double qc_max_missing = 0.10;
  int qc_min_mac = 5;  // per sex stratum
};

struct ScanRow {
  std::string snp_id;
  std::string model;   // additive/genotypic or M1..M4 with scheme suffix
  std::string test;
  double statistic = 0.0;
  int df = 0;
  std::optional<int> df2;
  double p_value = 1.0;
  double p_recommended = 1.0;  // genotypic (autosome) / M4 (X) p, same test
  int n_used = 0;
  int excluded_missing = 0;
  std::string note;  // empty when clean; degeneracy/QC/convergence flags
};

// Per-SNP association scan. Autosome SNPs run the additive and genotypic
// tests; X SNPs run M1/M2 under both XCI assumptions plus the
// coding-invariant M3 and M4 (six tests). SNPs are ordered by their minimal
// p-value across rows; per-SNP failures become flagged rows.
std::vector<ScanRow> scan(const Dataset& ds, const ScanOptions& opts);

// Pearson 1-df chi-squared comparison of observed female/control genotype
// counts against Hardy-Weinberg expectation. QC diagnostic only.
double hwe_check(long n_hom_ref, long n_het, long n_hom_alt);

struct AuditRow {
  std::string snp_id;
  std::string model;
  InvarianceReport report;
  std::string note;
};

// Batched coding-invariance audit over the dataset's X SNPs (all four
// schemes per model) and autosome SNPs (same- vs flipped-male-baseline
// additive+GS designs).
std::vector<AuditRow> audit(const Dataset& ds, Family family, TestKind test,
                            const std::vector<ModelId>& models);

void write_scan_tsv(std::ostream& os, const std::vector<ScanRow>& rows);
void write_audit_tsv(std::ostream& os, const std::vector<AuditRow>& rows);

}  // namespace xgwas
